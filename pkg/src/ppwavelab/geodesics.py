"""Geodesics of the plane-wave metric.

The geodesic system in coordinates (t, s, v) closes into

    t'' = 0
    s'' = -kappa_t t'^2 - 2 <grad_v kappa, v'> t'
    v'' = (1/2) grad_v kappa t'^2

so t is affine along every geodesic, and for t' = a != 0 the transverse
part is the linear system v'' = (f + A) v run at speed a. That reduction
is exposed separately from the direct integrator; tests play the two
against each other. The s-component is integrated as part of the coupled
system, not recovered from a constraint; the conserved kinetic energy
g(gamma', gamma') serves as the independent check.

The completeness probe integrates bundles of random geodesics to a large
affine horizon and certifies each run against the Gronwall envelope
|y(tau)| <= |y(0)| exp((1 + max|f + lambda|) |tau|) for the first-order
transverse data y = (v, v'). With initial components bounded by 2 the
envelope is implied by 2 sqrt(q) <= 1 + q, so a violation means a wrong
right-hand side, not a wrong bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BasePointMismatch, BlowUp, StepFailure
from .hill import HillSolution, eval_solution
from .model import ModelSpec, Point, Tangent, eval_kappa

__all__ = [
    "GeodesicPath",
    "ReducedPath",
    "geodesic_integrate",
    "energy",
    "reduced_system",
    "completeness_probe",
]

GEODESIC_TOL = 1e-10
MAX_HORIZON = 1e4
_A_FLOOR = 1e-12  # below this |t'| the t-reparametrization is singular


def energy(model: ModelSpec, tangent: Tangent) -> float:
    """g(X, X) at the base point; conserved along geodesics."""
    kap = eval_kappa(model, tangent.base, "value")
    return float(kap * tangent.dt ** 2 + tangent.dt * tangent.ds
                 + tangent.dv @ tangent.dv)


def _geodesic_rhs(model: ModelSpec):
    m = model.dim_v
    A = model.A

    def rhs(tau, y):
        t = y[0]
        v = y[2:2 + m]
        dt = y[2 + m]
        ds = y[3 + m]
        dv = y[4 + m:]
        grad = 2.0 * (model.f(t) * v + A @ v)
        kap_t = model.f(t, 1) * float(v @ v)
        out = np.empty_like(y)
        out[0] = dt
        out[1] = ds
        out[2:2 + m] = dv
        out[2 + m] = 0.0
        out[3 + m] = -kap_t * dt * dt - 2.0 * float(grad @ dv) * dt
        out[4 + m:] = 0.5 * grad * dt * dt
        return out

    return rhs


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    model: ModelSpec
    span: tuple[float, float]
    initial: Tangent
    _sol: object

    def state_at(self, tau: float) -> Tangent:
        lo, hi = self.span
        if not (lo <= tau <= hi):
            raise ValueError(f"tau = {tau} outside {self.span}")
        m = self.model.dim_v
        y = self._sol(float(tau))
        base = Point(float(y[0]), float(y[1]), y[2:2 + m])
        return Tangent(base, float(y[2 + m]), float(y[3 + m]), y[4 + m:])

    def point_at(self, tau: float) -> Point:
        return self.state_at(tau).base

    def energy_at(self, tau: float) -> float:
        return energy(self.model, self.state_at(tau))

    def energy_drift(self, taus) -> float:
        e0 = energy(self.model, self.initial)
        scale = 1.0 + abs(e0)
        return max(abs(self.energy_at(tau) - e0) / scale for tau in taus)


def geodesic_integrate(model: ModelSpec, p0: Point, v0: Tangent,
                       span: tuple[float, float],
                       tol: float = GEODESIC_TOL) -> GeodesicPath:
    """Integrate the geodesic with gamma(0) = p0, gamma'(0) = v0."""
    if tol > 1e-8:
        raise ValueError(f"tol must be <= 1e-8, got {tol}")
    if not v0.base.same_place(p0):
        raise BasePointMismatch("initial tangent is not based at p0")
    lo, hi = float(span[0]), float(span[1])
    if not lo <= 0.0 <= hi:
        raise ValueError("span must contain tau = 0")
    y0 = np.concatenate([[p0.t, p0.s], p0.v, [v0.dt, v0.ds], v0.dv])
    rhs = _geodesic_rhs(model)
    sols = {}
    for end in (hi, lo):
        if end == 0.0:
            continue
        sol = solve_ivp(rhs, (0.0, end), y0, method="DOP853",
                        rtol=tol, atol=tol, dense_output=True)
        if sol.status != 0:
            raise StepFailure(f"geodesic integration failed: {sol.message}")
        sols[np.sign(end)] = sol.sol

    def dense(tau):
        if tau > 0 and 1.0 in sols:
            return sols[1.0](tau)
        if tau < 0 and -1.0 in sols:
            return sols[-1.0](tau)
        return y0

    return GeodesicPath(model=model, span=(lo, hi), initial=v0, _sol=dense)


# -- reduction to the linear transverse system ------------------------------

@dataclass(frozen=True, eq=False)
class ReducedPath:
    """Transverse geodesic motion x(tau) = u(a tau) via the linear system."""

    model: ModelSpec
    a: float
    hill: HillSolution
    span: tuple[float, float]

    def at(self, tau: float):
        lo, hi = self.span
        if not lo <= tau <= hi:
            raise ValueError(f"tau = {tau} outside {self.span}")
        x, xdot = eval_solution(self.hill, self.a * float(tau))
        return x, self.a * xdot


def reduced_system(model: ModelSpec, a: float, x0, xdot0,
                   span: tuple[float, float]) -> ReducedPath:
    """Solve x'' = a^2 (f(a tau) + A) x by exact superposition of the
    fundamental pairs, i.e. the transverse part of a geodesic with
    t = a tau started at t = 0."""
    a = float(a)
    if abs(a) < _A_FLOOR:
        raise ValueError("reduction needs a != 0; the a = 0 transverse "
                         "motion is a straight line")
    hill = HillSolution(model, np.asarray(x0, dtype=float),
                        np.asarray(xdot0, dtype=float) / a)
    return ReducedPath(model=model, a=a, hill=hill,
                       span=(float(span[0]), float(span[1])))


# -- completeness probe -----------------------------------------------------

def _envelope_rate(model: ModelSpec) -> float:
    """1 + max_{t,i} |f(t) + lambda_i|, the probe's Gronwall rate.

    f is periodic, so the max over t is taken on a fine one-period grid.
    """
    grid = np.linspace(0.0, model.fourier.period, 1024, endpoint=False)
    vals = model.fourier(grid)
    q_sup = max(float(np.max(np.abs(vals + lam))) for lam in model.eigenvalues)
    return 1.0 + q_sup


def _batch_rhs(model: ModelSpec, trials: int):
    """The geodesic system for all trials stacked into one state vector.

    Independent trajectories share the step controller, which is the
    point: one solver pass instead of `trials` python-level loops.
    """
    m = model.dim_v
    n = 2 + m
    A = model.A

    def rhs(tau, y):
        Y = y.reshape(trials, 2 * n)
        t = Y[:, 0]
        v = Y[:, 2:2 + m]
        dt = Y[:, n]
        dv = Y[:, n + 2:]
        grad = 2.0 * (model.f(t)[:, None] * v + v @ A)
        kap_t = model.f(t, 1) * np.einsum("ij,ij->i", v, v)
        out = np.empty_like(Y)
        out[:, :2] = Y[:, n:n + 2]
        out[:, 2:2 + m] = dv
        out[:, n] = 0.0
        out[:, n + 1] = (-kap_t * dt
                         - 2.0 * np.einsum("ij,ij->i", grad, dv)) * dt
        out[:, n + 2:] = grad * (0.5 * dt * dt)[:, None]
        return out.reshape(-1)

    return rhs


def completeness_probe(model: ModelSpec, trials: int = 8,
                       horizon: float = 1e3, seed: int = 0,
                       checkpoints: int = 33,
                       tol: float = GEODESIC_TOL) -> dict:
    """Integrate random geodesics to +-horizon and certify the runs.

    Initial components are drawn uniformly from [-2, 2], seeded. A trial
    that cannot reach the horizon raises BlowUp: that outcome would
    falsify the completeness statement, so it is loud, never summarized
    away. The report carries the worst energy drift and the worst
    Gronwall envelope excess (negative = bound held with margin).
    """
    if horizon > MAX_HORIZON:
        raise ValueError(f"horizon must be <= {MAX_HORIZON:g}, got {horizon}")
    rng = np.random.default_rng(seed)
    m = model.dim_v
    n = 2 + m
    rate = _envelope_rate(model)
    taus = np.linspace(-horizon, horizon, checkpoints)
    y0 = np.empty((trials, 2 * n))
    for trial in range(trials):
        y0[trial, :n] = rng.uniform(-2, 2, n)
        y0[trial, n:] = rng.uniform(-2, 2, n)
    rhs = _batch_rhs(model, trials)

    states = {0.0: y0}
    for grid in (taus[taus > 0], taus[taus < 0][::-1]):
        if grid.size == 0:
            continue
        # overflow en route surfaces as BlowUp below; the fp warnings on
        # the way there are noise
        with np.errstate(over="ignore", invalid="ignore"):
            sol = solve_ivp(rhs, (0.0, grid[-1]), y0.reshape(-1),
                            method="DOP853", rtol=tol, atol=tol, t_eval=grid)
        if sol.status != 0 or not np.isfinite(sol.y).all():
            raise BlowUp(f"a trial did not reach |tau| = {horizon:g}: "
                         f"{sol.message}")
        for idx, tau in enumerate(sol.t):
            states[float(tau)] = sol.y[:, idx].reshape(trials, 2 * n)

    def kappa_rows(Y):
        t = Y[:, 0]
        v = Y[:, 2:2 + m]
        return model.f(t) * np.einsum("ij,ij->i", v, v) \
            + np.einsum("ij,ij->i", v @ model.A, v)

    def energies(Y):
        dt = Y[:, n]
        ds = Y[:, n + 1]
        dv = Y[:, n + 2:]
        return kappa_rows(Y) * dt * dt + dt * ds \
            + np.einsum("ij,ij->i", dv, dv)

    e0 = energies(y0)
    scale = 1.0 + np.abs(e0)
    norm0 = np.sqrt(np.einsum("ij,ij->i", y0[:, 2:2 + m], y0[:, 2:2 + m])
                    + np.einsum("ij,ij->i", y0[:, n + 2:], y0[:, n + 2:]))
    max_drift = 0.0
    max_excess = -np.inf
    max_norm = 0.0
    for tau in taus:
        Y = states[float(tau)]
        max_drift = max(max_drift,
                        float(np.max(np.abs(energies(Y) - e0) / scale)))
        v = Y[:, 2:2 + m]
        dv = Y[:, n + 2:]
        norm = np.sqrt(np.einsum("ij,ij->i", v, v)
                       + np.einsum("ij,ij->i", dv, dv))
        max_norm = max(max_norm, float(np.max(np.linalg.norm(v, axis=1))))
        live = (norm0 > 0.0) & (norm > 0.0)
        if live.any():
            excess = (np.log(norm[live]) - np.log(norm0[live])
                      - rate * abs(tau))
            max_excess = max(max_excess, float(np.max(excess)))
    envelope_ok = (max_excess <= 1e-9) if np.isfinite(max_excess) else True
    return {
        "trials": trials,
        "horizon": float(horizon),
        "seed": int(seed),
        "max_norm": float(max_norm),
        "envelope_ok": bool(envelope_ok),
        "envelope_rate": float(rate),
        "max_envelope_excess": (float(max_excess) if np.isfinite(max_excess)
                                else None),
        "max_energy_drift": float(max_drift),
    }

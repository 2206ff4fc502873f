"""The second-order linear system u'' = (f(t) + A) u and its structures.

Solutions are represented by their initial data (u(0), u'(0)); evaluation
goes through per-eigenvalue scalar fundamental pairs

    c'' = (f + lambda) c, c(0) = 1, c'(0) = 0,
    s'' = (f + lambda) s, s(0) = 0, s'(0) = 1,

whose Wronskian c s' - c' s is identically 1. Pairs are integrated with
an adaptive explicit Runge-Kutta scheme (DOP853) at tolerance 1e-10 and
stored as dense tables: cubic Hermite interpolation over the accepted
steps, with the step size capped so the interpolation error stays around
1e-11 relative, well under the 1e-8 contract. Tables grow lazily behind
a single-writer lock; readers always see a consistent snapshot.

Initial-data propagation over whole periods (shifts, monodromy) does not
use the tables at all: the period map is integrated once per eigenvalue
at tolerance 1e-12 and applied as exact matrix powers, which keeps the
symplectic and group-law residuals near roundoff.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import BlowUpDetected, ModelMismatch, NonSymmetric, StepFailure
from .model import ModelSpec

__all__ = [
    "HillSolution",
    "RiccatiField",
    "fundamental_pair",
    "eval_solution",
    "omega",
    "shift",
    "canonical_basis",
    "solution_from_data_at",
    "monodromy",
    "riccati_solve",
    "lagrangian_subspace",
    "lagrangian_residual",
]

PAIR_TOL = 1e-10           # solver tolerance for dense tables
PERIOD_MAP_TOL = 1e-12     # kept tighter: shifts and monodromy compound
INTERP_TARGET = 1e-11      # relative Hermite interpolation error target
BLOWUP_THRESHOLD = 1e8


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# -- scalar fundamental pairs -----------------------------------------------

def _step_cap(model: ModelSpec, lam: float) -> float:
    """Step cap making cubic Hermite interpolation ~1e-11 relative.

    The interpolation error on a step h is h^4/384 * |y''''| with
    y'''' = q'' y + 2 q' y' + q^2 y for q = f + lambda, so a coefficient
    bound B on |y''''|/|y| gives h = (384 * target / B)^(1/4).
    """
    four = model.fourier
    qmax = four.sup_bound(0) + abs(lam)
    bound = (four.sup_bound(2) + qmax ** 2
             + 2.0 * four.sup_bound(1) * (1.0 + np.sqrt(qmax)))
    bound = max(bound, 1e-12)
    h = (384.0 * INTERP_TARGET / bound) ** 0.25
    n_modes = max(1, len(four.modes))
    return float(np.clip(h, 1e-4, four.period / (8.0 * n_modes)))


class _PairTable:
    """Dense (c, c', s, s') table for one eigenvalue, lazily extended."""

    def __init__(self, model: ModelSpec, lam: float):
        self.model = model
        self.lam = lam
        self.max_step = _step_cap(model, lam)
        self._lock = threading.Lock()
        p = model.period
        t0 = np.array([0.0])
        y0 = np.array([[1.0, 0.0, 0.0, 1.0]])
        d0 = np.array([self._rhs(0.0, y0[0])])
        self._table = (t0, y0, d0, None)  # nodes, values, derivs, spline
        self._ensure_locked(-2.0 * p, 2.0 * p)

    def _rhs(self, t, y):
        q = self.model.f(t) + self.lam
        return np.array([y[1], q * y[0], y[3], q * y[2]])

    def _integrate(self, t_from: float, t_to: float, y_from: np.ndarray):
        sol = solve_ivp(self._rhs, (t_from, t_to), y_from, method="DOP853",
                        rtol=PAIR_TOL, atol=PAIR_TOL, max_step=self.max_step)
        if sol.status != 0:
            raise StepFailure(f"fundamental pair integration failed: {sol.message}")
        return sol.t, sol.y.T

    def _ensure_locked(self, lo: float, hi: float):
        with self._lock:
            t, y, d, _ = self._table
            changed = False
            if hi > t[-1]:
                ts, ys = self._integrate(t[-1], hi, y[-1])
                ds = np.array([self._rhs(tt, yy) for tt, yy in zip(ts[1:], ys[1:])])
                t = np.concatenate([t, ts[1:]])
                y = np.concatenate([y, ys[1:]])
                d = np.concatenate([d, ds])
                changed = True
            if lo < t[0]:
                ts, ys = self._integrate(t[0], lo, y[0])
                ds = np.array([self._rhs(tt, yy) for tt, yy in zip(ts[1:], ys[1:])])
                t = np.concatenate([ts[1:][::-1], t])
                y = np.concatenate([ys[1:][::-1], y])
                d = np.concatenate([ds[::-1], d])
                changed = True
            if changed or self._table[3] is None:
                spline = CubicHermiteSpline(t, y, d, axis=0)
                self._table = (t, y, d, spline)

    def ensure(self, lo: float, hi: float):
        t, _, _, spline = self._table
        if lo < t[0] or hi > t[-1] or spline is None:
            # grow in period-sized slack so repeated nearby calls stay cheap
            p = self.model.period
            self._ensure_locked(min(lo - p, t[0]), max(hi + p, t[-1]))

    def eval(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        self.ensure(float(t_arr.min()), float(t_arr.max()))
        spline = self._table[3]
        out = spline(t_arr)
        return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out

    @property
    def nodes(self):
        t, y, _, _ = self._table
        return t, y


_tables: "WeakKeyDictionary[ModelSpec, dict]" = WeakKeyDictionary()
_tables_lock = threading.Lock()


def _pair_table(model: ModelSpec, lam: float) -> _PairTable:
    with _tables_lock:
        per_model = _tables.setdefault(model, {})
    key = float(lam)
    table = per_model.get(key)
    if table is None:
        table = _PairTable(model, key)
        per_model[key] = table
    return table


def fundamental_pair(model: ModelSpec, lam: float, t: float):
    """(c(t), c'(t), s(t), s'(t)) for the eigenvalue parameter lam."""
    c, cd, s, sd = _pair_table(model, lam).eval(float(t))
    return float(c), float(cd), float(s), float(sd)


# -- vector solutions -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HillSolution:
    """A solution of u'' = (f + A) u, stored as initial data at t = 0."""

    model: ModelSpec
    u0: np.ndarray
    w0: np.ndarray  # u'(0)

    def __post_init__(self):
        m = self.model.dim_v
        u0 = _readonly(self.u0)
        w0 = _readonly(self.w0)
        if u0.shape != (m,) or w0.shape != (m,):
            raise ValueError(f"initial data must have shape ({m},)")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "w0", w0)

    def data(self) -> np.ndarray:
        return np.concatenate([self.u0, self.w0])

    def eval(self, t):
        return eval_solution(self, t)


def eval_solution(u: HillSolution, t):
    """(u(t), u'(t)); array t gives shape (m, len(t)) pairs.

    Decomposes the data along the eigenbasis of A and superposes the
    scalar fundamental pairs, exact linearity in the data.
    """
    model = u.model
    E = model.eigenvectors
    alpha = E.T @ u.u0
    beta = E.T @ u.w0
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.zeros((model.dim_v, t_arr.size))
    ders = np.zeros((model.dim_v, t_arr.size))
    for k, lam in enumerate(model.eigenvalues):
        table = _pair_table(model, float(lam))
        c, cd, s, sd = table.eval(t_arr).T
        vals[k] = alpha[k] * c + beta[k] * s
        ders[k] = alpha[k] * cd + beta[k] * sd
    vals = E @ vals
    ders = E @ ders
    if scalar:
        return vals[:, 0], ders[:, 0]
    return vals, ders


def omega(u1: HillSolution, u2: HillSolution, t: float = 0.0) -> float:
    """The skew product <u1', u2> - <u1, u2'>; independent of t."""
    if u1.model is not u2.model:
        raise ModelMismatch("solutions belong to different models")
    if t == 0.0:
        return float(u1.w0 @ u2.u0 - u1.u0 @ u2.w0)
    a1, d1 = u1.eval(t)
    a2, d2 = u2.eval(t)
    return float(d1 @ a2 - a1 @ d2)


# -- period map and shifts --------------------------------------------------

_period_maps: "WeakKeyDictionary[ModelSpec, dict]" = WeakKeyDictionary()


def _period_map_blocks(model: ModelSpec) -> np.ndarray:
    """Per-eigenvalue 2x2 maps Phi_lam(p), integrated directly."""
    cache = _period_maps.setdefault(model, {})
    if "blocks" not in cache:
        blocks = np.zeros((model.dim_v, 2, 2))
        for k, lam in enumerate(model.eigenvalues):
            def rhs(t, y, q0=float(lam)):
                q = model.f(t) + q0
                return [y[1], q * y[0], y[3], q * y[2]]

            sol = solve_ivp(rhs, (0.0, model.period), [1.0, 0.0, 0.0, 1.0],
                            method="DOP853", rtol=PERIOD_MAP_TOL,
                            atol=PERIOD_MAP_TOL)
            if sol.status != 0:
                raise StepFailure(f"period map integration failed: {sol.message}")
            c, cd, s, sd = sol.y[:, -1]
            blocks[k] = [[c, s], [cd, sd]]
        cache["blocks"] = blocks
    return cache["blocks"]


def monodromy(model: ModelSpec) -> np.ndarray:
    """Initial-data map of one period shift: z(0) -> z(p), shape (2m, 2m).

    Block layout [[C, S], [Cd, Sd]] acting on stacked (u0, w0); symplectic
    for the form with matrix [[0, -I], [I, 0]].
    """
    cache = _period_maps.setdefault(model, {})
    if "monodromy" not in cache:
        E = model.eigenvectors
        blocks = _period_map_blocks(model)
        m = model.dim_v
        M = np.zeros((2 * m, 2 * m))
        for (i, j) in ((0, 0), (0, 1), (1, 0), (1, 1)):
            M[i * m:(i + 1) * m, j * m:(j + 1) * m] = \
                E @ np.diag(blocks[:, i, j]) @ E.T
        cache["monodromy"] = _readonly(M)
    return cache["monodromy"]


def _monodromy_power(model: ModelSpec, k: int) -> np.ndarray:
    cache = _period_maps.setdefault(model, {})
    powers = cache.setdefault("powers", {})
    k = int(k)
    if k not in powers:
        M = monodromy(model)
        if k == 0:
            powers[k] = np.eye(M.shape[0])
        elif k > 0:
            powers[k] = np.linalg.matrix_power(M, k)
        else:
            if "inv" not in cache:
                cache["inv"] = np.linalg.inv(M)
            powers[k] = np.linalg.matrix_power(cache["inv"], -k)
    return powers[k]


def shift(u: HillSolution, k: int) -> HillSolution:
    """(T^k u)(t) = u(t - k p), as new initial data M^{-k} z."""
    z = _monodromy_power(u.model, -int(k)) @ u.data()
    m = u.model.dim_v
    return HillSolution(u.model, z[:m], z[m:])


def canonical_basis(model: ModelSpec):
    """(xi_i) with data (e_i, 0) and (xi*_i) with data (0, e_i)."""
    m = model.dim_v
    eye = np.eye(m)
    xi = [HillSolution(model, eye[i], np.zeros(m)) for i in range(m)]
    xi_star = [HillSolution(model, np.zeros(m), eye[i]) for i in range(m)]
    return xi, xi_star


def solution_from_data_at(model: ModelSpec, t0: float, u_t0, w_t0) -> HillSolution:
    """The solution with u(t0), u'(t0) prescribed, pulled back to data at 0.

    Per eigencomponent the evolution matrix [[c, s], [c', s']](t0) has
    unit determinant, so its inverse is exact.
    """
    E = model.eigenvectors
    alpha_t = E.T @ np.asarray(u_t0, dtype=float)
    beta_t = E.T @ np.asarray(w_t0, dtype=float)
    alpha0 = np.empty_like(alpha_t)
    beta0 = np.empty_like(beta_t)
    for k, lam in enumerate(model.eigenvalues):
        c, cd, s, sd = _pair_table(model, float(lam)).eval(float(t0))
        alpha0[k] = sd * alpha_t[k] - s * beta_t[k]
        beta0[k] = -cd * alpha_t[k] + c * beta_t[k]
    return HillSolution(model, E @ alpha0, E @ beta0)


# -- Riccati flow -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RiccatiField:
    """Dense solution of B' + B^2 = f I + A with symmetric B.

    `covered` is the realized interval; it is smaller than the requested
    one exactly when a blow-up truncated a side, recorded in `blowup` as
    (t_star, side) with side in {"left", "right"}.
    """

    model: ModelSpec
    B0: np.ndarray
    t_min: float
    t_max: float
    covered: tuple[float, float]
    blowup: tuple[float, str] | None
    _forward: object
    _backward: object

    def at(self, t: float) -> np.ndarray:
        t = float(t)
        lo, hi = self.covered
        if t < lo or t > hi:
            if self.blowup is not None:
                raise BlowUpDetected(*self.blowup)
            raise ValueError(f"t = {t} outside solved span [{lo}, {hi}]")
        m = self.model.dim_v
        if t >= 0.0:
            if self._forward is None:
                return np.array(self.B0)
            return self._forward(t).reshape(m, m)
        return self._backward(t).reshape(m, m)


def riccati_solve(model: ModelSpec, B0, t_min: float, t_max: float,
                  require_full_span: bool = False,
                  blowup_threshold: float = BLOWUP_THRESHOLD) -> RiccatiField:
    """Integrate the matrix Riccati equation from B(0) = B0 over the span.

    Blow-up is detected by |B| crossing `blowup_threshold`; the returned
    field is truncated there, and with require_full_span=True the
    truncation raises BlowUpDetected instead.
    """
    m = model.dim_v
    B0 = np.array(B0, dtype=float)
    if B0.shape != (m, m):
        raise ValueError(f"B0 must be {m}x{m}")
    if float(np.max(np.abs(B0 - B0.T))) > 1e-12 * max(1.0, float(np.max(np.abs(B0)))):
        raise NonSymmetric("B0 is not symmetric")
    if not (t_min <= 0.0 <= t_max):
        raise ValueError("span must contain 0")

    A = model.A
    eye = np.eye(m)

    def rhs(t, y):
        B = y.reshape(m, m)
        return (model.f(t) * eye + A - B @ B).ravel()

    def big(t, y):
        return float(np.max(np.abs(y))) - blowup_threshold

    big.terminal = True

    blowup = None
    lo, hi = float(t_min), float(t_max)
    forward = backward = None
    if t_max > 0.0:
        sol = solve_ivp(rhs, (0.0, t_max), B0.ravel(), method="DOP853",
                        rtol=1e-10, atol=1e-10, dense_output=True, events=big)
        if sol.t_events[0].size:
            hi = float(sol.t_events[0][0])
            blowup = (hi, "right")
        elif sol.status == -1:
            hi = float(sol.t[-1])
            blowup = (hi, "right")
        forward = sol.sol
    else:
        hi = 0.0
    if t_min < 0.0:
        sol = solve_ivp(rhs, (0.0, t_min), B0.ravel(), method="DOP853",
                        rtol=1e-10, atol=1e-10, dense_output=True, events=big)
        if sol.t_events[0].size:
            lo = float(sol.t_events[0][0])
            blowup = (lo, "left")
        elif sol.status == -1:
            lo = float(sol.t[-1])
            blowup = (lo, "left")
        backward = sol.sol
    else:
        lo = 0.0

    if require_full_span and blowup is not None:
        raise BlowUpDetected(*blowup)
    return RiccatiField(model=model, B0=_readonly(B0), t_min=float(t_min),
                        t_max=float(t_max), covered=(lo, hi), blowup=blowup,
                        _forward=forward, _backward=backward)


def lagrangian_subspace(model: ModelSpec, B) -> list[HillSolution]:
    """Basis u_j with u_j(0) = e_j, u_j'(0) = B(0) e_j.

    B may be a RiccatiField (its value at 0 is used) or a symmetric
    matrix directly. Symmetry makes the span omega-isotropic of
    dimension n - 2.
    """
    m = model.dim_v
    B0 = B.at(0.0) if isinstance(B, RiccatiField) else np.array(B, dtype=float)
    eye = np.eye(m)
    return [HillSolution(model, eye[j], B0 @ eye[j]) for j in range(m)]


def lagrangian_residual(model: ModelSpec, B0, u: HillSolution) -> float:
    """|u'(0) - B0 u(0)|, zero iff u lies in the graph subspace of B0."""
    B0 = np.asarray(B0, dtype=float)
    return float(np.linalg.norm(u.w0 - B0 @ u.u0))

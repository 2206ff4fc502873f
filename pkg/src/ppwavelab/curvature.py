"""Curvature tensors and the parallelism / degeneracy checks.

Everything is computed in coordinates from the analytic Christoffel
symbols. The package does not hard-code the (known, very sparse) closed
form of the curvature; tests compare against it and against a
finite-difference-of-Christoffels oracle instead.

Covariant derivatives of the rank-4 tensors are formed by central finite
differences of the component arrays plus analytic Christoffel correction
terms; the step is a parameter with default 1e-4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    ModelSpec,
    Point,
    Tangent,
    S_INDEX,
    T_INDEX,
    V_OFFSET,
    christoffel_raw,
    inverse_metric_components,
    metric_components,
)

__all__ = [
    "CurvatureBundle",
    "ParallelismResiduals",
    "curvature_at",
    "parallelism_residuals",
    "weyl_magnitude",
    "olszak_check",
    "olszak_deviation",
]

DEFAULT_FD_STEP = 1e-4
WEYL_NONZERO_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    """Riemann (fully lowered), Ricci, scalar and Weyl at one point."""

    point: Point
    riemann: np.ndarray   # R_{abcd}
    ricci: np.ndarray     # R_{bd}
    scalar: float
    weyl: np.ndarray      # W_{abcd}


def _christoffel_partials(model: ModelSpec, t: float, v: np.ndarray) -> np.ndarray:
    """dgamma[k, mu, nu, e] = d_e Gamma^k_{mu nu}, all analytic."""
    n = model.n
    m = model.dim_v
    dg = np.zeros((n, n, n, n))
    f1 = model.f(t, 1)
    f2 = model.f(t, 2)
    f0 = model.f(t)
    hess = 2.0 * (f0 * np.eye(m) + model.A)       # d_i d_j kappa
    dtdv = 2.0 * f1 * v                           # d_t d_i kappa

    # Gamma^s_tt = d_t kappa
    dg[S_INDEX, T_INDEX, T_INDEX, T_INDEX] = f2 * (v @ v)
    dg[S_INDEX, T_INDEX, T_INDEX, V_OFFSET:] = dtdv
    # Gamma^s_it = Gamma^s_ti = d_i kappa
    dg[S_INDEX, V_OFFSET:, T_INDEX, T_INDEX] = dtdv
    dg[S_INDEX, T_INDEX, V_OFFSET:, T_INDEX] = dtdv
    dg[S_INDEX, V_OFFSET:, T_INDEX, V_OFFSET:] = hess
    dg[S_INDEX, T_INDEX, V_OFFSET:, V_OFFSET:] = hess
    # Gamma^i_tt = -(1/2) d_i kappa
    dg[V_OFFSET:, T_INDEX, T_INDEX, T_INDEX] = -0.5 * dtdv
    dg[V_OFFSET:, T_INDEX, T_INDEX, V_OFFSET:] = -0.5 * hess
    return dg


def _riemann_up(model: ModelSpec, t: float, v: np.ndarray) -> np.ndarray:
    """R^r_{s mu nu} = d_mu G^r_{nu s} - d_nu G^r_{mu s} + G G - G G."""
    gamma = christoffel_raw(model, t, v)
    dg = _christoffel_partials(model, t, v)
    term1 = np.einsum("rnsm->rsmn", dg)
    term2 = np.einsum("rmsn->rsmn", dg)
    quad1 = np.einsum("rml,lns->rsmn", gamma, gamma)
    quad2 = np.einsum("rnl,lms->rsmn", gamma, gamma)
    return term1 - term2 + quad1 - quad2


def _tensors_raw(model: ModelSpec, t: float, s: float, v: np.ndarray):
    """(riemann_lowered, ricci, scalar, weyl) at raw coordinates."""
    n = model.n
    point = Point(t, s, v)
    g = metric_components(model, point)
    ginv = inverse_metric_components(model, point)
    r_up = _riemann_up(model, t, v)
    riem = np.einsum("ar,rbcd->abcd", g, r_up)
    ricci = np.einsum("msmn->sn", r_up)
    scalar = float(np.einsum("ab,ab->", ginv, ricci))

    # Conformal decomposition, each placement spelled out to avoid sign slips.
    gac_rbd = np.einsum("ac,bd->abcd", g, ricci)
    gad_rbc = np.einsum("ad,bc->abcd", g, ricci)
    gbd_rac = np.einsum("bd,ac->abcd", g, ricci)
    gbc_rad = np.einsum("bc,ad->abcd", g, ricci)
    gac_gbd = np.einsum("ac,bd->abcd", g, g)
    gad_gbc = np.einsum("ad,bc->abcd", g, g)
    weyl = (riem
            - (gac_rbd - gad_rbc + gbd_rac - gbc_rad) / (n - 2)
            + scalar * (gac_gbd - gad_gbc) / ((n - 1) * (n - 2)))
    return riem, ricci, scalar, weyl


def curvature_at(model: ModelSpec, point: Point) -> CurvatureBundle:
    riem, ricci, scalar, weyl = _tensors_raw(model, point.t, point.s, point.v)
    return CurvatureBundle(point=point, riemann=riem, ricci=ricci,
                           scalar=scalar, weyl=weyl)


def _covariant_derivative(model: ModelSpec, point: Point, which: str,
                          step: float) -> np.ndarray:
    """(nabla_e T)_{abcd} for T = riemann or weyl, shape (n, n, n, n, n).

    Last axis is the derivative direction e. Partials by central FD of the
    components, corrections from the analytic Christoffels.
    """
    n = model.n
    idx = {"riemann": 0, "weyl": 3}[which]
    x0 = point.as_array()

    partial = np.zeros((n,) * 5)
    for e in range(n):
        xp = x0.copy()
        xp[e] += step
        xm = x0.copy()
        xm[e] -= step
        tp = _tensors_raw(model, xp[0], xp[1], xp[2:])[idx]
        tm = _tensors_raw(model, xm[0], xm[1], xm[2:])[idx]
        partial[..., e] = (tp - tm) / (2.0 * step)

    tensor = _tensors_raw(model, point.t, point.s, point.v)[idx]
    gamma = christoffel_raw(model, point.t, point.v)
    corr = (np.einsum("fea,fbcd->abcde", gamma, tensor)
            + np.einsum("feb,afcd->abcde", gamma, tensor)
            + np.einsum("fec,abfd->abcde", gamma, tensor)
            + np.einsum("fed,abcf->abcde", gamma, tensor))
    return partial - corr


class ParallelismResiduals(NamedTuple):
    weyl_residual: float
    riemann_residual: float


def parallelism_residuals(model: ModelSpec, points: list[Point],
                          step: float = DEFAULT_FD_STEP) -> ParallelismResiduals:
    """Max |nabla W| and max |nabla R| over the sample points.

    For a strict model the Weyl tensor is parallel but the Riemann tensor
    is not; for a constant-profile relaxed model both residuals vanish
    (local symmetry).
    """
    if not (0.0 < step <= 1e-3):
        raise ValueError(f"step must lie in (0, 1e-3], got {step}")
    weyl_res = 0.0
    riem_res = 0.0
    for point in points:
        weyl_res = max(weyl_res, float(np.max(np.abs(
            _covariant_derivative(model, point, "weyl", step)))))
        riem_res = max(riem_res, float(np.max(np.abs(
            _covariant_derivative(model, point, "riemann", step)))))
    return ParallelismResiduals(weyl_res, riem_res)


def weyl_magnitude(model: ModelSpec, points: list[Point]) -> float:
    """Max |W| component over the samples; > 0 separates the family from
    the conformally flat case."""
    return max(float(np.max(np.abs(curvature_at(model, p).weyl)))
               for p in points)


# -- the degenerate-direction test ------------------------------------------

OLSZAK_TOL = 1e-8


def olszak_deviation(model: ModelSpec, point: Point, u: Tangent) -> float:
    """Max 3-form component of g(u, .) ^ W(x, y, ., .) over spanning x, y.

    Zero exactly when u lies in the degenerate distribution that the Weyl
    tensor singles out (spanned by d_s for these models).
    """
    n = model.n
    g = metric_components(model, point)
    w = curvature_at(model, point).weyl
    omega = g @ u.as_array()
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            eta = w[a, b]
            # (omega ^ eta)_{cde}, eta antisymmetric
            for c in range(n):
                for d in range(c + 1, n):
                    for e in range(d + 1, n):
                        val = (omega[c] * eta[d, e]
                               + omega[d] * eta[e, c]
                               + omega[e] * eta[c, d])
                        if abs(val) > worst:
                            worst = abs(val)
    return worst


def olszak_check(model: ModelSpec, point: Point, u: Tangent) -> bool:
    return olszak_deviation(model, point, u) < OLSZAK_TOL

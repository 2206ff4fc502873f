"""Killing fields of the model metric and the isometry algebra count.

Three families span the identity component's algebra:

  * wave fields E_u = (0, -2<u'(t), v>, u(t)) for solutions u of the
    transverse linear system; the catalog instantiates them on the
    canonical basis (E_i from xi_i, E*_i from xi*_i),
  * the vertical field Z = d/ds,
  * rotation fields X_F = (0, 0, F v) for skew F commuting with A.

The factor 2 in the s-component of E_u balances the cross term of the
metric, whose (t, s) component is 1/2; with it the Lie derivative of the
metric vanishes identically.

Brackets close in closed form (Z central):

    [E_a, E_b]  = 2 Omega(a, b) Z
    [X_F, E_i]  = sum_l F_il E_l      (same for the starred family)

The identity component's dimension is (2n - 3) + dim s(A), where s(A)
is the skew centralizer of A. It is computed two independent ways: as
the nullspace of F -> AF - FA restricted to skew matrices, and from the
eigenvalue multiplicities as sum m_a (m_a - 1) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ModelMismatch
from .hill import HillSolution, canonical_basis, eval_solution
from .model import (ModelSpec, Point, Tangent, christoffel_at,
                    kappa_gradient_v, metric_components)

__all__ = [
    "KillingField",
    "SkewBasis",
    "wave_field",
    "vertical_field",
    "rotation_field",
    "catalog_fields",
    "killing_eval",
    "field_flow",
    "killing_residual",
    "bracket_eval",
    "commutator_check",
    "eigenvalue_clusters",
    "centralizer_basis",
    "noncommuting_probe",
    "isom0_dimension",
    "dims_report",
    "rotation_flow",
]

CLUSTER_RTOL = 1e-8
_SKEW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KillingField:
    """A field from the catalog: kind "E", "E*", "Z", or "X_F".

    E and E* carry a backing solution u (and their catalog index, used
    only for labels); X_F carries the skew matrix F.
    """

    kind: str
    index: int | None = None
    u: HillSolution | None = None
    F: np.ndarray | None = None

    @property
    def label(self) -> str:
        if self.kind in ("E", "E*") and self.index is not None:
            star = "*" if self.kind == "E*" else ""
            return f"E{star}_{self.index + 1}"
        return self.kind


def wave_field(u: HillSolution, starred: bool = False,
               index: int | None = None) -> KillingField:
    """E_u for any transverse solution u; starred only affects the label."""
    return KillingField("E*" if starred else "E", index=index, u=u)


def vertical_field() -> KillingField:
    return KillingField("Z")


def rotation_field(F) -> KillingField:
    """X_F for skew F. Commutation with A is not required here: the field
    is Killing exactly when [A, F] = 0, and killing_residual detects the
    failure, which tests rely on."""
    F = np.array(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise ValueError("F must be a square matrix")
    if float(np.max(np.abs(F + F.T))) > _SKEW_TOL * max(1.0, float(np.max(np.abs(F)))):
        raise ValueError("F must be skew-symmetric")
    F.setflags(write=False)
    return KillingField("X_F", F=F)


def catalog_fields(model: ModelSpec) -> list[KillingField]:
    """The 2n - 3 fields E_1..E_m, E*_1..E*_m, Z (m = n - 2)."""
    xi, xi_star = canonical_basis(model)
    fields = [wave_field(u, False, i) for i, u in enumerate(xi)]
    fields += [wave_field(u, True, i) for i, u in enumerate(xi_star)]
    fields.append(vertical_field())
    return fields


def _check_field(model: ModelSpec, field: KillingField):
    if field.u is not None and field.u.model is not model:
        raise ModelMismatch("field's backing solution belongs to a different model")
    if field.F is not None and field.F.shape != (model.dim_v, model.dim_v):
        raise ModelMismatch("F has the wrong transverse dimension")


def _components(model: ModelSpec, field: KillingField, point: Point) -> np.ndarray:
    m = model.dim_v
    out = np.zeros(model.n)
    if field.kind == "Z":
        out[1] = 1.0
    elif field.kind == "X_F":
        out[2:] = field.F @ point.v
    else:
        u_t, w_t = eval_solution(field.u, point.t)
        out[1] = -2.0 * float(w_t @ point.v)
        out[2:] = u_t
    return out


def killing_eval(model: ModelSpec, field: KillingField, point: Point) -> Tangent:
    _check_field(model, field)
    c = _components(model, field, point)
    return Tangent(point, c[0], c[1], c[2:].copy())


def field_flow(model: ModelSpec, field: KillingField, point: Point,
               tau: float) -> Point:
    """The time-tau flow of the field, exact for every kind."""
    _check_field(model, field)
    tau = float(tau)
    if field.kind == "Z":
        return Point(point.t, point.s + tau, point.v)
    if field.kind == "X_F":
        return Point(point.t, point.s, expm(tau * field.F) @ point.v)
    u_t, w_t = eval_solution(field.u, point.t)
    s = point.s - tau * float(w_t @ (2.0 * point.v + tau * u_t))
    return Point(point.t, s, point.v + tau * u_t)


def _jacobian(model: ModelSpec, field: KillingField, point: Point) -> np.ndarray:
    """dX[mu, nu] = d_mu X^nu in coordinate order (t, s, v)."""
    n = model.n
    dX = np.zeros((n, n))
    if field.kind == "X_F":
        dX[2:, 2:] = field.F.T  # d_j (F v)_i = F_ij
    elif field.kind != "Z":
        u_t, w_t = eval_solution(field.u, point.t)
        udd = model.f(point.t) * u_t + model.A @ u_t
        dX[0, 1] = -2.0 * float(udd @ point.v)
        dX[0, 2:] = w_t
        dX[2:, 1] = -2.0 * w_t
    return dX


def killing_residual(model: ModelSpec, field: KillingField, samples) -> float:
    """max |g(nabla_mu X, nu) + g(mu, nabla_nu X)| over samples and the
    coordinate frame.

    In covariant components the summand is d_mu X_nu + d_nu X_mu
    - 2 Gamma^r_{mu nu} X_r. For wave fields u'' is evaluated as
    (f + A) u from the same interpolated u, so the cancellation against
    the kappa derivatives inside Gamma is exact and the residual sits at
    roundoff.
    """
    _check_field(model, field)
    worst = 0.0
    for point in samples:
        x = _components(model, field, point)
        dX = _jacobian(model, field, point)
        g = metric_components(model, point)
        x_low = g @ x
        d_low = dX @ g
        # position dependence of the metric: only g_tt varies
        if x[0] != 0.0:
            d_low[0, 0] += model.f(point.t, 1) * float(point.v @ point.v) * x[0]
            d_low[2:, 0] += kappa_gradient_v(model, point.t, point.v) * x[0]
        gamma = christoffel_at(model, point)
        lie = d_low + d_low.T - 2.0 * np.einsum("kmn,k->mn", gamma, x_low)
        worst = max(worst, float(np.max(np.abs(lie))))
    return worst


def bracket_eval(model: ModelSpec, X: KillingField, Y: KillingField,
                 point: Point) -> np.ndarray:
    """[X, Y] at a point, componentwise, from the analytic jacobians."""
    _check_field(model, X)
    _check_field(model, Y)
    x = _components(model, X, point)
    y = _components(model, Y, point)
    return x @ _jacobian(model, Y, point) - y @ _jacobian(model, X, point)


def commutator_check(model: ModelSpec, F, tol: float) -> dict:
    """Compare analytic brackets of X_F with the catalog against the
    closed forms [X_F, E_i] = sum_l F_il E_l (ditto E*) and [X_F, Z] = 0.

    Sampling is deterministic; the report carries the worst deviation
    per family.
    """
    XF = rotation_field(F)
    _check_field(model, XF)
    F = XF.F
    xi, xi_star = canonical_basis(model)
    rng = np.random.default_rng(0)
    p = model.fourier.period
    points = [Point(rng.uniform(-2 * p, 2 * p), rng.uniform(-1, 1),
                    rng.uniform(-2, 2, model.dim_v)) for _ in range(10)]
    dev_e = dev_star = dev_z = 0.0
    for point in points:
        zb = bracket_eval(model, XF, vertical_field(), point)
        dev_z = max(dev_z, float(np.max(np.abs(zb))))
        for family, devname in ((xi, "E"), (xi_star, "E*")):
            comps = np.array([_components(model, wave_field(u), point)
                              for u in family])
            for i in range(model.dim_v):
                got = bracket_eval(model, XF, wave_field(family[i]), point)
                want = F[i] @ comps
                dev = float(np.max(np.abs(got - want)))
                if devname == "E":
                    dev_e = max(dev_e, dev)
                else:
                    dev_star = max(dev_star, dev)
    return {
        "max_dev_E": dev_e,
        "max_dev_E_star": dev_star,
        "max_dev_Z": dev_z,
        "tol": float(tol),
        "points": len(points),
        "pass": max(dev_e, dev_star, dev_z) <= tol,
    }


# -- centralizer and dimension count ----------------------------------------

@dataclass(frozen=True, eq=False)
class SkewBasis:
    """Frobenius-orthonormal skew matrices spanning the centralizer of A."""

    elements: tuple[np.ndarray, ...]
    dim: int


def eigenvalue_clusters(eigenvalues, rtol: float = CLUSTER_RTOL) -> list[list[int]]:
    """Indices of the (sorted) eigenvalues grouped by near-equality."""
    eigs = np.asarray(eigenvalues, dtype=float)
    scale = max(1.0, float(np.max(np.abs(eigs)))) if eigs.size else 1.0
    clusters: list[list[int]] = []
    for i in range(eigs.size):
        if clusters and abs(eigs[i] - eigs[clusters[-1][0]]) <= rtol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def centralizer_basis(A) -> SkewBasis:
    """Nullspace of F -> AF - FA restricted to skew matrices.

    Columns of the commutator map are taken over the unit-Frobenius
    elementary skew matrices, so unit right-singular vectors at zero
    singular value come back as Frobenius-orthonormal basis elements.
    The rank cut matches the eigenvalue clustering tolerance (the
    singular values are exactly the eigenvalue gaps |lambda_i - lambda_j|).
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    if not pairs:
        return SkewBasis((), 0)
    root_half = 1.0 / np.sqrt(2.0)
    basis = []
    cols = []
    for a, b in pairs:
        K = np.zeros((m, m))
        K[a, b] = root_half
        K[b, a] = -root_half
        basis.append(K)
        cols.append((A @ K - K @ A).reshape(-1))
    M = np.column_stack(cols)
    _, sing, vt = np.linalg.svd(M, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(A)))))
    elements = []
    for k in range(len(pairs)):
        if sing[k] > CLUSTER_RTOL * scale:
            continue
        F = sum(c * K for c, K in zip(vt[k], basis))
        F = 0.5 * (F - F.T)
        F.setflags(write=False)
        elements.append(F)
    return SkewBasis(tuple(elements), len(elements))


def noncommuting_probe(model: ModelSpec) -> KillingField:
    """An X_F with ||[A, F]||_F = 1, for showing the residual detects the
    centralizer condition. Built on the widest eigenvalue gap of A."""
    lams = model.eigenvalues
    E = model.eigenvectors
    best = (0.0, 0, 0)
    for i in range(lams.size):
        for j in range(i + 1, lams.size):
            gap = abs(float(lams[i] - lams[j]))
            if gap > best[0]:
                best = (gap, i, j)
    gap, i, j = best
    if gap == 0.0:
        raise ValueError("A has no eigenvalue gap; every skew matrix commutes")
    K = np.outer(E[:, i], E[:, j]) - np.outer(E[:, j], E[:, i])
    return rotation_field(K / (np.sqrt(2.0) * gap))


def isom0_dimension(model: ModelSpec) -> int:
    """dim of the isometry algebra: 2(n-2) wave + 1 vertical + rotations."""
    return (2 * model.n - 3) + centralizer_basis(model.A).dim


def dims_report(model: ModelSpec) -> dict:
    """The dimension count plus the data it depends on.

    trace_nonconstant reports whether trace K(t) = (n-2) f(t) actually
    varies; a constant trace would admit extra fields outside the
    catalog, so reports surface it.
    """
    clusters = eigenvalue_clusters(model.eigenvalues)
    return {
        "n": model.n,
        "multiplicities": [len(c) for c in clusters],
        "dim_s": centralizer_basis(model.A).dim,
        "dim_isom0": isom0_dimension(model),
        "trace_nonconstant": bool(model.fourier.nonconstant),
    }


def rotation_flow(F, tau: float) -> np.ndarray:
    """The orthogonal matrix exp(tau F); acts on the v block of points."""
    return expm(float(tau) * np.asarray(F, dtype=float))

"""The solvable transformation group acting by isometries.

Elements are triples (k, x, u): an integer period count, a vertical
offset, and a solution of the transverse linear system. The action on
points is

    (k, x, u) . (t, s, v) = (t + k p, s + x - <u'(t), 2 v + u(t)>, v + u(t))

which is an isometry for every solution u because u'' = (f + A) u cancels
the transport of kappa exactly. Composition threads the period shift
T^k u = u(. - k p) through the skew product Omega:

    g1 g2 = (k1 + k2, x1 + x2 - Omega(u1, T^{k2} u2), T^{-k2} u1 + u2)

and the inverse is solved from g g' = e rather than hard-coded (the skew
term collapses to Omega(u, -u) = 0, so it lands at (-k, -x, -T^k u)).

The k = 0 part is a Heisenberg group of the form Omega; the bridge maps
below identify it with the standard matrix model, data-level, no
integration. Lattices of spatial elements (0, r, w) with w in the
Lagrangian subspace are validated, not synthesized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ModelMismatch, NonCommutingF, RankDeficient
from .hill import (HillSolution, RiccatiField, eval_solution,
                   lagrangian_residual, omega, shift)
from .model import ModelSpec, Point, Tangent, metric_at

__all__ = [
    "GroupElement",
    "HeisElement",
    "SigmaLattice",
    "g_identity",
    "g_compose",
    "g_inverse",
    "g_act",
    "g_act_differential",
    "isometry_residual",
    "element_gap",
    "heis_bridge",
    "heis_mul",
    "heis_identity",
    "pi_automorphism",
    "rotation_automorphism",
    "sigma_validate",
]

OMEGA_TOL = 1e-8
COMMUTE_TOL = 1e-9
_COMM_CHECK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GroupElement:
    model: ModelSpec
    k: int
    x: float
    u: HillSolution

    def __post_init__(self):
        if self.u.model is not self.model:
            raise ModelMismatch("solution belongs to a different model")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "x", float(self.x))


def g_identity(model: ModelSpec) -> GroupElement:
    m = model.dim_v
    return GroupElement(model, 0, 0.0, HillSolution(model, np.zeros(m), np.zeros(m)))


def g_compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    if g1.model is not g2.model:
        raise ModelMismatch("elements belong to different models")
    u1s = shift(g1.u, -g2.k)
    x = g1.x + g2.x - omega(g1.u, shift(g2.u, g2.k))
    u = HillSolution(g1.model, u1s.u0 + g2.u.u0, u1s.w0 + g2.u.w0)
    return GroupElement(g1.model, g1.k + g2.k, x, u)


def g_inverse(g: GroupElement) -> GroupElement:
    """Solve g . g' = e for g' componentwise.

    k and the solution slot force k' = -k, u' = -T^k u; the x slot is
    then read off from the composition law. Computing it (instead of
    writing -x) keeps the inverse pinned to whatever g_compose does.
    """
    us = shift(g.u, g.k)
    u_inv = HillSolution(g.model, -us.u0, -us.w0)
    x_inv = omega(g.u, shift(u_inv, -g.k)) - g.x
    return GroupElement(g.model, -g.k, x_inv, u_inv)


def g_act(g: GroupElement, point: Point) -> Point:
    u_t, w_t = eval_solution(g.u, point.t)
    return Point(point.t + g.k * g.model.period,
                 point.s + g.x - float(w_t @ (2.0 * point.v + u_t)),
                 point.v + u_t)


def g_act_differential(g: GroupElement, tangent: Tangent) -> Tangent:
    """Pushforward; the base point moves by the action.

    u'' is taken as (f + A) u from the same evaluated u, which is what
    makes the pushforward metric-preserving to roundoff.
    """
    model = g.model
    p = tangent.base
    u_t, w_t = eval_solution(g.u, p.t)
    udd = model.f(p.t) * u_t + model.A @ u_t
    ds = (tangent.ds
          - (float(udd @ (2.0 * p.v + u_t)) + float(w_t @ w_t)) * tangent.dt
          - 2.0 * float(w_t @ tangent.dv))
    return Tangent(g_act(g, p), tangent.dt, ds, tangent.dv + w_t * tangent.dt)


def isometry_residual(g: GroupElement, samples) -> float:
    """max |g(dPhi X, dPhi Y) - g(X, Y)| over samples (point, X, Y).

    The leading point names the common base; the tangents carry it.
    """
    model = g.model
    worst = 0.0
    for _, X, Y in samples:
        before = metric_at(model, X, Y)
        after = metric_at(model, g_act_differential(g, X),
                          g_act_differential(g, Y))
        worst = max(worst, abs(after - before))
    return worst


def element_gap(g1: GroupElement, g2: GroupElement) -> float:
    """Coordinate distance on (k, x, data); zero iff the elements agree."""
    return (abs(g1.k - g2.k) + abs(g1.x - g2.x)
            + float(np.max(np.abs(g1.u.data() - g2.u.data()))))


# -- Heisenberg bridge ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HeisElement:
    """(a, b, c) in the upper-unitriangular matrix coordinates."""

    a: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be vectors of equal length")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))


def heis_bridge(g: GroupElement) -> HeisElement:
    """Matrix-model coordinates of a k = 0 element.

    The composite of (0, x, u) -> (-x, u) into the Omega-form group and
    (tau, u) -> (u(0), u'(0), -tau/2 + <u(0), u'(0)>/2); multiplication
    goes to c1 + c2 + <a1, b2> on the c slot, and the skew term of the
    composition law is exactly the resulting commutator defect.
    """
    if g.k != 0:
        raise ValueError("the bridge is defined on the k = 0 subgroup")
    a = g.u.u0
    b = g.u.w0
    return HeisElement(a, b, 0.5 * g.x + 0.5 * float(a @ b))


def heis_mul(h1: HeisElement, h2: HeisElement) -> HeisElement:
    return HeisElement(h1.a + h2.a, h1.b + h2.b,
                       h1.c + h2.c + float(h1.a @ h2.b))


def heis_identity(m: int) -> HeisElement:
    return HeisElement(np.zeros(m), np.zeros(m), 0.0)


def _rotation_matrix(model: ModelSpec, F) -> np.ndarray:
    """exp(F) for skew F commuting with A; non-commuting F is rejected
    because e^F then fails to map solutions to solutions."""
    F = np.asarray(F, dtype=float)
    A = model.A
    comm = A @ F - F @ A
    scale = max(1.0, float(np.max(np.abs(A))) * float(np.max(np.abs(F))))
    if float(np.max(np.abs(comm))) > _COMM_CHECK_TOL * scale:
        raise NonCommutingF("F does not commute with A")
    return expm(F)


def pi_automorphism(model: ModelSpec, F, h: HeisElement) -> HeisElement:
    """(a, b, c) -> (e^F a, e^F b, c); an automorphism of the product."""
    R = _rotation_matrix(model, F)
    return HeisElement(R @ h.a, R @ h.b, h.c)


def rotation_automorphism(model: ModelSpec, F, g: GroupElement) -> GroupElement:
    """The same automorphism upstairs: (k, x, u) -> (k, x, e^F u)."""
    R = _rotation_matrix(model, F)
    return GroupElement(model, g.k, g.x,
                        HillSolution(model, R @ g.u.u0, R @ g.u.w0))


# -- lattices of spatial elements -------------------------------------------

@dataclass(frozen=True, eq=False)
class SigmaLattice:
    """Generators (r_j, w_j), each standing for the element (0, r_j, w_j)."""

    model: ModelSpec
    generators: tuple

    def __post_init__(self):
        gens = []
        for r, w in self.generators:
            if w.model is not self.model:
                raise ModelMismatch("generator solution belongs to a different model")
            gens.append((float(r), w))
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def rank(self) -> int:
        """Rank of the generator rows (r, u(0), u'(0)); n - 1 when the
        lattice spans the vertical direction plus a Lagrangian subspace."""
        if not self.generators:
            return 0
        rows = np.stack([np.concatenate(([r], w.u0, w.w0))
                         for r, w in self.generators])
        return int(np.linalg.matrix_rank(rows, tol=1e-10))

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self.model, 0, r, w) for r, w in self.generators]


def sigma_validate(lattice: SigmaLattice, B0=None,
                   omega_tol: float = OMEGA_TOL,
                   commute_tol: float = COMMUTE_TOL) -> dict:
    """Check a candidate generator set against the quotient requirements.

    Abelianity is checked twice: on the skew products of the solutions
    and on the actual composition commutators. Membership in the
    Lagrangian subspace is checked against B0 when one is supplied;
    without B0 the pairwise skew products already certify that the
    solutions span an isotropic subspace, hence sit inside a common
    Lagrangian one.
    """
    if not lattice.generators:
        raise RankDeficient("empty generator set")
    model = lattice.model
    sols = [w for _, w in lattice.generators]
    omega_res = 0.0
    for i in range(len(sols)):
        for j in range(i + 1, len(sols)):
            omega_res = max(omega_res, abs(omega(sols[i], sols[j])))
    elems = lattice.elements()
    commute_res = 0.0
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            lhs = g_compose(elems[i], elems[j])
            rhs = g_compose(elems[j], elems[i])
            commute_res = max(commute_res, element_gap(lhs, rhs))
    membership = None
    if B0 is not None:
        B0 = B0.at(0.0) if isinstance(B0, RiccatiField) else np.asarray(B0, dtype=float)
        membership = max(lagrangian_residual(model, B0, w) for w in sols)
        in_l_ok = membership <= omega_tol
    else:
        in_l_ok = omega_res <= omega_tol
    return {
        "count": len(elems),
        "rank": lattice.rank,
        "omega_residual": float(omega_res),
        "commute_residual": float(commute_res),
        "membership_residual": membership,
        "abelian_ok": bool(omega_res <= omega_tol and commute_res <= commute_tol),
        "in_L_ok": bool(in_l_ok),
    }

"""Parallel transport and the shear-only holonomy of the quotients.

Everything here is phrased in the adapted frame at a base point,

    S = d/ds,  E_i = d/dv_i,  T = 2 (d/dt - kappa d/ds),

whose Gram matrix is constant: G = [[0, 0, 1], [0, I, 0], [1, 0, 0]] in
the order (S, E, T). S is parallel along every curve (no Christoffel
symbol carries a lower s index), so transport matrices fix the first
frame column exactly; the content of the holonomy computation is that
the E block stays the identity too, leaving only shears E_i -> E_i + c_i S,
T -> T - c_i E_i - (|c|^2/2) S.

Deck transformations sigma with a straight geodesic representative from
the origin to sigma . origin give the quotient's holonomy along that
generator: numerically as frame transport conjugated back by the inverse
action's differential, and in closed form from the initial derivative of
the generator's solution. The one convention sign the closed form cannot
fix on paper is measured against the numeric path once per model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from weakref import WeakKeyDictionary

from .errors import BlockViolation, NotAGenerator, NotInSigmaForm, StepFailure
from .group import GroupElement, g_act, g_act_differential, g_inverse
from .model import ModelSpec, Point, Tangent, christoffel_raw, eval_kappa

__all__ = [
    "CurveSpec",
    "TransportMatrix",
    "frame_gram",
    "frame_matrix",
    "curve_between",
    "rectangle_loop",
    "parallel_transport",
    "generator_curve",
    "quotient_transport",
    "closed_form_transport",
    "resolved_sign",
    "holonomy_sampler",
]

TRANSPORT_TOL = 1e-10
VERTICAL_GATE = 1e-9
ROTATION_GATE = 1e-6


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """A polyline tau in [0, 1] -> coordinates, legs equal in parameter.

    A single vertex is the constant curve. The velocity is the leg
    direction times the leg count; at joints it is taken from the leg to
    the right.
    """

    vertices: tuple

    def __post_init__(self):
        verts = []
        dim = None
        for p in self.vertices:
            x = p.as_array() if isinstance(p, Point) else np.array(p, dtype=float)
            if dim is None:
                dim = x.shape
            elif x.shape != dim:
                raise ValueError("curve vertices have mixed dimensions")
            x.setflags(write=False)
            verts.append(x)
        if not verts:
            raise ValueError("a curve needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(verts))

    @property
    def n_legs(self) -> int:
        return len(self.vertices) - 1

    def _leg(self, tau: float) -> tuple[int, float]:
        if not 0.0 <= tau <= 1.0:
            raise ValueError("curve parameter runs over [0, 1]")
        legs = self.n_legs
        i = min(int(tau * legs), legs - 1)
        return i, tau * legs - i

    def point_at(self, tau: float) -> Point:
        x = self.coords(tau)
        return Point(x[0], x[1], x[2:])

    def coords(self, tau: float) -> np.ndarray:
        if self.n_legs == 0:
            return self.vertices[0]
        i, local = self._leg(float(tau))
        a, b = self.vertices[i], self.vertices[i + 1]
        return a + local * (b - a)

    def velocity(self, tau: float) -> np.ndarray:
        if self.n_legs == 0:
            return np.zeros_like(self.vertices[0])
        i, _ = self._leg(float(tau))
        return (self.vertices[i + 1] - self.vertices[i]) * self.n_legs

    def reversed(self) -> "CurveSpec":
        return CurveSpec(tuple(reversed(self.vertices)))


def curve_between(p_from: Point, p_to: Point) -> CurveSpec:
    return CurveSpec((p_from, p_to))


def rectangle_loop(base: Point, dir_a, dir_b) -> CurveSpec:
    """The closed loop base -> +a -> +b -> -a -> -b."""
    x0 = base.as_array()
    dir_a = np.asarray(dir_a, dtype=float)
    dir_b = np.asarray(dir_b, dtype=float)
    return CurveSpec((x0, x0 + dir_a, x0 + dir_a + dir_b, x0 + dir_b, x0))


def frame_gram(m: int) -> np.ndarray:
    G = np.zeros((m + 2, m + 2))
    G[0, -1] = G[-1, 0] = 1.0
    G[1:-1, 1:-1] = np.eye(m)
    return G


def frame_matrix(model: ModelSpec, point: Point) -> np.ndarray:
    """Columns (S, E_1..E_m, T) in coordinates (t, s, v)."""
    m = model.dim_v
    F = np.zeros((model.n, model.n))
    F[1, 0] = 1.0                       # S
    F[2:, 1:-1] = np.eye(m)             # E block
    F[0, -1] = 2.0                      # T
    F[1, -1] = -2.0 * eval_kappa(model, point, "value")
    return F


@dataclass(frozen=True, eq=False)
class TransportMatrix:
    """A transport map expressed in the adapted frame."""

    model: ModelSpec
    matrix: np.ndarray

    def gram_residual(self) -> float:
        G = frame_gram(self.model.dim_v)
        M = self.matrix
        return float(np.max(np.abs(M.T @ G @ M - G)))

    def vertical_residual(self) -> float:
        e0 = np.zeros(self.model.n)
        e0[0] = 1.0
        return float(np.max(np.abs(self.matrix @ e0 - e0)))

    def rotation_residual(self) -> float:
        m = self.model.dim_v
        return float(np.max(np.abs(self.matrix[1:-1, 1:-1] - np.eye(m))))

    def shear(self) -> np.ndarray:
        """The coupling coefficients c_i read off the E columns."""
        return np.array(self.matrix[0, 1:-1])


def _transport_leg(model: ModelSpec, x0: np.ndarray, dx: np.ndarray,
                   Y0: np.ndarray, tol: float) -> np.ndarray:
    """Transport the column stack Y along tau -> x0 + tau dx, tau in [0, 1]."""
    n = model.n
    m = model.dim_v

    def rhs(tau, y):
        x = x0 + tau * dx
        gamma = christoffel_raw(model, x[0], x[2:2 + m])
        G = -np.tensordot(gamma, dx, axes=([1], [0]))  # -Gamma^k_{mu nu} dx^mu
        return (G @ y.reshape(n, n)).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), Y0.ravel(), method="DOP853",
                    rtol=tol, atol=tol)
    if sol.status != 0:
        raise StepFailure(f"parallel transport failed: {sol.message}")
    return sol.y[:, -1].reshape(n, n)


def parallel_transport(model: ModelSpec, curve: CurveSpec,
                       tol: float = TRANSPORT_TOL) -> np.ndarray:
    """Transport the coordinate frame along the curve; n x n matrix.

    Holonomy deviations are second-order small, so a loose tolerance
    would swamp them; anything above 1e-8 is refused.
    """
    if not tol <= 1e-8:
        raise ValueError("transport tolerance must be <= 1e-8")
    Y = np.eye(model.n)
    for i in range(curve.n_legs):
        a, b = curve.vertices[i], curve.vertices[i + 1]
        if np.array_equal(a, b):
            continue
        Y = _transport_leg(model, a, b - a, Y, tol)
    return Y


# -- quotient holonomy along deck generators --------------------------------

def _origin(model: ModelSpec) -> Point:
    return Point(0.0, 0.0, np.zeros(model.dim_v))


def generator_curve(model: ModelSpec, sigma: GroupElement) -> CurveSpec:
    """The straight geodesic from the origin to sigma . origin.

    Defined for pure period translates (u = 0) and spatial elements
    (k = 0); a mixed element has no straight representative because its
    endpoint sits at a different t with a bent transverse path.
    """
    if sigma.k != 0 and float(np.max(np.abs(sigma.u.data()))) > 0.0:
        raise NotAGenerator(
            "mixed generator: no straight geodesic joins the origin to its image")
    origin = _origin(model)
    end = g_act(sigma, origin)
    if origin.same_place(end):
        return CurveSpec((origin,))
    return curve_between(origin, end)


def _pushforward_jacobian(model: ModelSpec, g: GroupElement,
                          at: Point) -> np.ndarray:
    """Coordinate matrix of the action's differential at the given point."""
    n = model.n
    m = model.dim_v
    J = np.zeros((n, n))
    eye = np.eye(n)
    for mu in range(n):
        e = eye[mu]
        tang = Tangent(at, e[0], e[1], e[2:2 + m])
        out = g_act_differential(g, tang)
        J[0, mu] = out.dt
        J[1, mu] = out.ds
        J[2:, mu] = out.dv
    return J


def quotient_transport(model: ModelSpec, sigma: GroupElement,
                       tol: float = TRANSPORT_TOL) -> TransportMatrix:
    """Holonomy of the deck generator: transport the adapted frame along
    the straight representative, then carry it back with the inverse
    action's differential and express it in the original frame."""
    curve = generator_curve(model, sigma)
    origin = _origin(model)
    F = frame_matrix(model, origin)
    P = parallel_transport(model, curve, tol)
    end = curve.point_at(1.0)
    J = _pushforward_jacobian(model, g_inverse(sigma), end)
    M = np.linalg.solve(F, J @ P @ F)
    return TransportMatrix(model=model, matrix=M)


_shear_signs: "WeakKeyDictionary[ModelSpec, float]" = WeakKeyDictionary()


def _closed_form_matrix(model: ModelSpec, sigma: GroupElement,
                        sign: float) -> np.ndarray:
    m = model.dim_v
    c = 2.0 * sign * np.array(sigma.u.w0)
    M = np.eye(m + 2)
    M[0, 1:-1] = c
    M[1:-1, -1] = -c
    M[0, -1] = -0.5 * float(c @ c)
    return M


def resolved_sign(model: ModelSpec) -> float:
    """Orientation of the E -> S coupling, pinned once per model by
    comparing the closed form against one numeric probe transport."""
    if model not in _shear_signs:
        from .hill import HillSolution
        m = model.dim_v
        u0 = np.zeros(m)
        w0 = np.zeros(m)
        u0[0] = 0.3
        w0[0] = 0.4
        probe = GroupElement(model, 0, 0.0, HillSolution(model, u0, w0))
        M_num = quotient_transport(model, probe).matrix
        best = min((+1.0, -1.0),
                   key=lambda s: float(np.max(np.abs(
                       _closed_form_matrix(model, probe, s) - M_num))))
        _shear_signs[model] = best
    return _shear_signs[model]


def closed_form_transport(model: ModelSpec, sigma: GroupElement) -> TransportMatrix:
    """The shear matrix predicted from the generator's initial derivative.

    Only spatial elements (0, r, w) carry one; the Gram constraints pin
    everything except one sign, which resolved_sign measures.
    """
    if sigma.k != 0:
        raise NotInSigmaForm("closed-form transport needs a spatial element (0, r, w)")
    sign = resolved_sign(model)
    return TransportMatrix(model=model,
                           matrix=_closed_form_matrix(model, sigma, sign))


# -- sampling over closed coordinate loops ----------------------------------

def holonomy_sampler(model: ModelSpec, count: int = 12,
                     loop_scale: float = 1.0, seed: int = 0,
                     tol: float = TRANSPORT_TOL) -> dict:
    """Transport the adapted frame around random coordinate rectangles.

    Every loop must come back in the shear normal form: S column intact,
    no rotation in the E block, Gram preserved. A loop outside the gates
    raises BlockViolation (with the report attached) after the sweep.
    """
    if not loop_scale <= 1.0:
        raise ValueError("loop_scale must be <= 1")
    rng = np.random.default_rng(seed)
    n = model.n
    worst = {"vertical_residual": 0.0, "rotation_residual": 0.0,
             "gram_residual": 0.0, "shear_magnitude": 0.0}
    violations = 0
    for _ in range(count):
        base = Point(rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1, model.dim_v))
        mu, nu = rng.choice(n, size=2, replace=False)
        dir_a = np.zeros(n)
        dir_b = np.zeros(n)
        dir_a[mu] = rng.uniform(0.4, 0.9) * loop_scale
        dir_b[nu] = rng.uniform(0.4, 0.9) * loop_scale
        F = frame_matrix(model, base)
        Y = parallel_transport(model, rectangle_loop(base, dir_a, dir_b), tol)
        M = TransportMatrix(model=model, matrix=np.linalg.solve(F, Y @ F))
        vert = M.vertical_residual()
        rot = M.rotation_residual()
        if vert > VERTICAL_GATE or rot > ROTATION_GATE:
            violations += 1
        worst["vertical_residual"] = max(worst["vertical_residual"], vert)
        worst["rotation_residual"] = max(worst["rotation_residual"], rot)
        worst["gram_residual"] = max(worst["gram_residual"], M.gram_residual())
        worst["shear_magnitude"] = max(worst["shear_magnitude"],
                                       float(np.max(np.abs(M.shear()))))
    worst["count"] = count
    worst["loop_scale"] = float(loop_scale)
    worst["seed"] = int(seed)
    worst["pass_rate"] = (count - violations) / count if count else 1.0
    if violations:
        err = BlockViolation(
            f"{violations} of {count} loops left the shear block "
            f"(worst vertical {worst['vertical_residual']:.3e}, "
            f"rotation {worst['rotation_residual']:.3e})")
        err.report = worst
        raise err
    return worst

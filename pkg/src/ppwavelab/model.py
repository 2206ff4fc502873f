"""Model spaces: metric, profile data, and Christoffel symbols.

A model lives on R^2 x V with V = R^(n-2), coordinates ordered
(t, s, v_1, ..., v_{n-2}), and carries the metric

    g = kappa dt^2 + dt ds + <dv, dv>,
    kappa(t, v) = f(t) <v, v> + <A v, v>,

with f a smooth periodic profile (a finite Fourier series here) and A a
symmetric traceless operator on V. Componentwise the convention is

    g_tt = kappa,  g_ts = g_st = 1/2,  g_ii = 1,

i.e. "dt ds" is the symmetric product. This is the unique choice under
which the nonzero Christoffel symbols are

    Gamma^s_tt = d_t kappa,   Gamma^s_it = Gamma^s_ti = d_i kappa,
    Gamma^i_tt = -(1/2) d_i kappa,

and under which the deck-transformation action implemented in `group`
is an isometry; both facts are pinned by tests.

Two validation modes exist. "strict" is the geometrically interesting
regime: n >= 5, f nonconstant, A != 0. "relaxed" admits the degenerate
comparison cases (n >= 4, constant f, A = 0) that the test oracles need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BasePointMismatch,
    ConfigError,
    ConstantF,
    DimensionTooSmall,
    InvalidSelector,
    NonSymmetric,
    NonTraceless,
    ZeroOperator,
)
from .fourier import FourierSeries

__all__ = [
    "ModelSpec",
    "Point",
    "Tangent",
    "build_model",
    "eval_kappa",
    "metric_at",
    "metric_components",
    "inverse_metric_components",
    "christoffel_at",
    "model_from_config",
    "config_fingerprint",
]

# Coordinate layout used across the package.
T_INDEX = 0
S_INDEX = 1
V_OFFSET = 2

_SYM_TOL = 1e-12
_TRACE_TOL = 1e-12
_ZERO_TOL = 1e-14


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Validated model data plus derived spectral data of A.

    Eigenvalues are sorted descending; eigenvector columns are orthonormal
    and sign-normalized (first nonzero entry positive) so the decomposition
    is deterministic. Arrays are read-only.
    """

    n: int
    fourier: FourierSeries
    A: np.ndarray
    mode: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, A @ e_i = lambda_i e_i

    @property
    def dim_v(self) -> int:
        return self.n - 2

    @property
    def period(self) -> float:
        return self.fourier.period

    def f(self, t, order: int = 0):
        return self.fourier(t, order)


@dataclass(frozen=True, eq=False)
class Point:
    """A point (t, s, v) of the model space."""

    t: float
    s: float
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "v", _readonly(self.v))

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.t, self.s], self.v))

    def same_place(self, other: "Point") -> bool:
        return (self.t == other.t and self.s == other.s
                and self.v.shape == other.v.shape
                and bool(np.all(self.v == other.v)))


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector (dt, ds, dv) anchored at `base`."""

    base: Point
    dt: float
    ds: float
    dv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "ds", float(self.ds))
        object.__setattr__(self, "dv", _readonly(self.dv))

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.dt, self.ds], self.dv))


def _sorted_eigh(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            vecs[:, j] = -col
    return vals, vecs


def build_model(n: int, fourier: FourierSeries, A, mode: str = "strict") -> ModelSpec:
    """Validate the ingredients and assemble a ModelSpec.

    strict:  n >= 5, f nonconstant, A symmetric traceless nonzero.
    relaxed: n >= 4, constant f and A = 0 admitted (A still symmetric
             traceless).
    """
    if mode not in ("strict", "relaxed"):
        raise ValueError(f"mode must be 'strict' or 'relaxed', got {mode!r}")
    n = int(n)
    min_n = 5 if mode == "strict" else 4
    if n < min_n:
        raise DimensionTooSmall(f"n = {n} below minimum {min_n} for {mode} mode")

    A = np.array(A, dtype=float)
    m = n - 2
    if A.shape != (m, m):
        raise ValueError(f"A must be {m}x{m} for n = {n}, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if float(np.max(np.abs(A - A.T))) > _SYM_TOL * scale:
        raise NonSymmetric("A is not symmetric")
    if abs(float(np.trace(A))) > _TRACE_TOL * scale * m:
        raise NonTraceless(f"trace A = {np.trace(A)!r} is not zero")
    is_zero = float(np.max(np.abs(A))) <= _ZERO_TOL
    if mode == "strict" and is_zero:
        raise ZeroOperator("A = 0 is not allowed in strict mode")
    if mode == "strict" and not fourier.nonconstant:
        raise ConstantF("constant profile f is not allowed in strict mode")

    A = 0.5 * (A + A.T)  # kill representation noise; validated symmetric above
    vals, vecs = _sorted_eigh(A)
    return ModelSpec(n=n, fourier=fourier, A=_readonly(A), mode=mode,
                     eigenvalues=_readonly(vals), eigenvectors=_readonly(vecs))


# -- kappa and derivatives --------------------------------------------------

_SELECTORS = ("value", "dt", "di", "dtt", "dtdi", "didj")


def eval_kappa(model: ModelSpec, point: Point, selector: str = "value",
               i: int | None = None, j: int | None = None) -> float:
    """kappa or one of its partial derivatives at a point.

    selector: "value", "dt", "di", "dtt", "dtdi", "didj"; the V-indices
    i (and j for "didj") are 0-based. All derivatives are analytic:

        d_i kappa      = 2 (f v + A v)_i
        d_t kappa      = f'(t) |v|^2
        d_t d_i kappa  = 2 f'(t) v_i
        d_i d_j kappa  = 2 (f delta_ij + A_ij)
        d_t^2 kappa    = f''(t) |v|^2
    """
    if selector not in _SELECTORS:
        raise InvalidSelector(f"unknown selector {selector!r}; expected one of {_SELECTORS}")
    needs_i = selector in ("di", "dtdi", "didj")
    if needs_i and i is None:
        raise InvalidSelector(f"selector {selector!r} needs index i")
    if selector == "didj" and j is None:
        raise InvalidSelector("selector 'didj' needs indices i and j")
    m = model.dim_v
    if needs_i and not (0 <= int(i) < m):
        raise InvalidSelector(f"index i = {i} out of range for dim V = {m}")
    if selector == "didj" and not (0 <= int(j) < m):
        raise InvalidSelector(f"index j = {j} out of range for dim V = {m}")

    t, v = point.t, point.v
    if selector == "value":
        return float(model.f(t) * (v @ v) + v @ model.A @ v)
    if selector == "dt":
        return float(model.f(t, 1) * (v @ v))
    if selector == "di":
        return float(2.0 * (model.f(t) * v[i] + (model.A @ v)[i]))
    if selector == "dtt":
        return float(model.f(t, 2) * (v @ v))
    if selector == "dtdi":
        return float(2.0 * model.f(t, 1) * v[i])
    # didj
    return float(2.0 * (model.f(t) * (1.0 if i == j else 0.0) + model.A[i, j]))


def kappa_gradient_v(model: ModelSpec, t: float, v: np.ndarray) -> np.ndarray:
    """The V-gradient (d_1 kappa, ..., d_m kappa) = 2 (f(t) v + A v)."""
    return 2.0 * (model.f(t) * v + model.A @ v)


# -- metric -----------------------------------------------------------------

def metric_components(model: ModelSpec, point: Point) -> np.ndarray:
    """Component matrix g_{mu nu} in coordinate order (t, s, v)."""
    n = model.n
    g = np.zeros((n, n))
    g[T_INDEX, T_INDEX] = eval_kappa(model, point)
    g[T_INDEX, S_INDEX] = g[S_INDEX, T_INDEX] = 0.5
    for k in range(model.dim_v):
        g[V_OFFSET + k, V_OFFSET + k] = 1.0
    return g


def inverse_metric_components(model: ModelSpec, point: Point) -> np.ndarray:
    """g^{mu nu}: the (t, s) block inverts in closed form.

    [[kappa, 1/2], [1/2, 0]]^(-1) = [[0, 2], [2, -4 kappa]].
    """
    n = model.n
    ginv = np.zeros((n, n))
    kap = eval_kappa(model, point)
    ginv[T_INDEX, S_INDEX] = ginv[S_INDEX, T_INDEX] = 2.0
    ginv[S_INDEX, S_INDEX] = -4.0 * kap
    for k in range(model.dim_v):
        ginv[V_OFFSET + k, V_OFFSET + k] = 1.0
    return ginv


def metric_at(model: ModelSpec, X: Tangent, Y: Tangent) -> float:
    """g(X, Y) for two tangent vectors at the same base point."""
    if not X.base.same_place(Y.base):
        raise BasePointMismatch("tangent vectors are based at different points")
    kap = eval_kappa(model, X.base)
    return float(kap * X.dt * Y.dt
                 + 0.5 * (X.dt * Y.ds + X.ds * Y.dt)
                 + X.dv @ Y.dv)


# -- Christoffel symbols ----------------------------------------------------

def christoffel_at(model: ModelSpec, point: Point) -> np.ndarray:
    """Gamma[k, mu, nu] = Gamma^k_{mu nu}, coordinate order (t, s, v).

    Only three families are nonzero; everything else is exactly 0.0
    (there is no cancellation, these are closed forms).
    """
    n = model.n
    gamma = np.zeros((n, n, n))
    t, v = point.t, point.v
    dkv = kappa_gradient_v(model, t, v)
    dkt = model.f(t, 1) * (v @ v)
    gamma[S_INDEX, T_INDEX, T_INDEX] = dkt
    for i in range(model.dim_v):
        gamma[S_INDEX, V_OFFSET + i, T_INDEX] = dkv[i]
        gamma[S_INDEX, T_INDEX, V_OFFSET + i] = dkv[i]
        gamma[V_OFFSET + i, T_INDEX, T_INDEX] = -0.5 * dkv[i]
    return gamma


def christoffel_raw(model: ModelSpec, t: float, v: np.ndarray) -> np.ndarray:
    """christoffel_at for raw (t, v) state; the hot path for integrators."""
    n = model.n
    gamma = np.zeros((n, n, n))
    dkv = kappa_gradient_v(model, t, v)
    gamma[S_INDEX, T_INDEX, T_INDEX] = model.f(t, 1) * (v @ v)
    gamma[S_INDEX, V_OFFSET:, T_INDEX] = dkv
    gamma[S_INDEX, T_INDEX, V_OFFSET:] = dkv
    gamma[V_OFFSET:, T_INDEX, T_INDEX] = -0.5 * dkv
    return gamma


# -- JSON config ------------------------------------------------------------

def _require(cond: bool, pointer: str, message: str):
    if not cond:
        raise ConfigError(pointer, message)


def _as_number(value, pointer: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             pointer, f"expected a number, got {value!r}")
    _require(np.isfinite(value), pointer, f"expected a finite number, got {value!r}")
    return float(value)


def model_from_config(cfg: dict) -> ModelSpec:
    """Build a model from a config mapping, reporting JSON-pointer paths.

    Expected shape:
        {"n": int, "period": num, "fourier": {"a0": num, "modes": [[a, b], ...]},
         "A": [[...], ...], "mode": "strict" | "relaxed"}
    """
    _require(isinstance(cfg, dict), "", "config must be a JSON object")
    for key in ("n", "period", "fourier", "A"):
        _require(key in cfg, f"/{key}", "missing required key")

    n = cfg["n"]
    _require(isinstance(n, int) and not isinstance(n, bool),
             "/n", f"expected an integer, got {n!r}")
    period = _as_number(cfg["period"], "/period")
    _require(period > 0, "/period", f"period must be positive, got {period}")

    four = cfg["fourier"]
    _require(isinstance(four, dict), "/fourier", "expected an object")
    a0 = _as_number(four.get("a0", 0.0), "/fourier/a0")
    raw_modes = four.get("modes", [])
    _require(isinstance(raw_modes, list), "/fourier/modes", "expected an array")
    modes = []
    for idx, pair in enumerate(raw_modes):
        ptr = f"/fourier/modes/{idx}"
        _require(isinstance(pair, (list, tuple)) and len(pair) == 2,
                 ptr, f"expected a pair [a_m, b_m], got {pair!r}")
        modes.append((_as_number(pair[0], f"{ptr}/0"),
                      _as_number(pair[1], f"{ptr}/1")))

    raw_A = cfg["A"]
    m = n - 2
    _require(isinstance(raw_A, list) and len(raw_A) == m,
             "/A", f"expected {m} rows for n = {n}")
    rows = []
    for r, row in enumerate(raw_A):
        _require(isinstance(row, list) and len(row) == m,
                 f"/A/{r}", f"expected {m} entries")
        rows.append([_as_number(x, f"/A/{r}/{c}") for c, x in enumerate(row)])

    mode = cfg.get("mode", "strict")
    _require(mode in ("strict", "relaxed"),
             "/mode", f"expected 'strict' or 'relaxed', got {mode!r}")

    fourier = FourierSeries(period=period, a0=a0, modes=tuple(modes))
    try:
        return build_model(n, fourier, np.array(rows), mode=mode)
    except DimensionTooSmall as exc:
        raise ConfigError("/n", str(exc)) from exc
    except ConstantF as exc:
        raise ConfigError("/fourier", str(exc)) from exc
    except (NonSymmetric, NonTraceless, ZeroOperator) as exc:
        raise ConfigError("/A", str(exc)) from exc


def config_fingerprint(cfg: dict) -> str:
    """sha256 of the canonical JSON form of a config mapping."""
    import hashlib
    import json

    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()

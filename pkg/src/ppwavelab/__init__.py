"""Numerical laboratory for a family of plane-fronted wave metrics.

The metric lives on R^2 x R^(n-2) with coordinates (t, s, v),

    g = kappa dt^2 + dt ds + <dv, dv>,
    kappa(t, v) = f(t) <v, v> + <A v, v>,

with f periodic and A symmetric traceless. Submodules:

    model       metric, validation, Christoffel symbols, JSON config
    fourier     finite Fourier series profiles with exact derivatives
    curvature   Riemann/Ricci/Weyl tensors, parallelism residuals
    hill        the transverse linear system, monodromy, Riccati flow
    geodesics   geodesic integration and the completeness probe
    killing     Killing field catalog, centralizer, dimension count
    group       the isometry group, Heisenberg bridge, lattice checks
    holonomy    parallel transport and the shear-only holonomy
    report      machine-readable run reports
    cli         the `ppwavelab` command-line front end

The interesting regime ("strict") is n >= 5, f nonconstant, A != 0;
degenerate comparison cases are admitted under mode="relaxed".
"""

from .errors import PpwaveError
from .model import ModelSpec, Point, Tangent, build_model, model_from_config

__version__ = "0.1.0"

__all__ = [
    "PpwaveError",
    "ModelSpec",
    "Point",
    "Tangent",
    "build_model",
    "model_from_config",
    "__version__",
]

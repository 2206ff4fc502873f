"""Command line front end.

Every subcommand loads a model config, runs one verification surface,
and emits a JSON report (stdout or --out). Reports are deterministic for
a fixed config and seed; --timing adds wall time as an explicitly
non-reproducible extra. --csv writes the check table next to the JSON,
--figures renders PNG companions into a directory.

Exit codes: 0 all checks pass, 2 unusable input, 3 a check failed,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .curvature import (WEYL_NONZERO_FLOOR, olszak_check,
                        parallelism_residuals, weyl_magnitude)
from .errors import (BlockViolation, BlowUp, CheckFailure, ConfigError,
                     ModelValidationError, PpwaveError)
from .figures import (matrix_figure, profile_figure, residual_figure,
                      trajectory_figure)
from .geodesics import (GEODESIC_TOL, completeness_probe, geodesic_integrate,
                        reduced_system)
from .group import (GroupElement, SigmaLattice, element_gap, g_act,
                    g_compose, g_identity, g_inverse, heis_bridge, heis_mul,
                    isometry_residual, pi_automorphism, rotation_automorphism,
                    sigma_validate)
from .hill import HillSolution, lagrangian_subspace
from .holonomy import (TRANSPORT_TOL, closed_form_transport, holonomy_sampler,
                       quotient_transport, resolved_sign)
from .killing import (catalog_fields, centralizer_basis, commutator_check,
                      dims_report, killing_residual, noncommuting_probe,
                      rotation_field)
from .model import (ModelSpec, Point, Tangent, config_fingerprint,
                    model_from_config)
from .report import RunReport, write_csv

__all__ = ["main", "build_parser"]

# Gates used by the report checks; the same numbers the library invariants
# are stated with.
WEYL_PARALLEL_TOL = 1e-5
RIEMANN_PARALLEL_TOL = 1e-5
RIEMANN_NONPARALLEL_FLOOR = 1e-4
ENERGY_DRIFT_TOL = 1e-7
REDUCED_TOL = 1e-6
KILLING_TOL = 1e-7
DETECTION_FLOOR = 1e-3
GROUP_TOL = 1e-9
ACTION_TOL = 1e-8
ISOMETRY_TOL = 1e-7
BRIDGE_TOL = 1e-9
SIGMA_DEV_TOL = 1e-6
K_IDENTITY_TOL = 1e-8
LOOP_VERTICAL_TOL = 1e-9
LOOP_ROTATION_TOL = 1e-6


# -- config helpers ---------------------------------------------------------

def _load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read config file: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("", "config top level must be an object")
    return cfg


def _vector_from(value, pointer: str, m: int) -> np.ndarray:
    if not (isinstance(value, list) and len(value) == m):
        raise ConfigError(pointer, f"expected an array of {m} numbers")
    try:
        return np.array([float(x) for x in value])
    except (TypeError, ValueError) as exc:
        raise ConfigError(pointer, f"expected numbers: {exc}") from exc


def _b0_from_config(model: ModelSpec, cfg: dict) -> np.ndarray | None:
    """Optional symmetric matrix under /riccati_B0, row-major."""
    raw = cfg.get("riccati_B0")
    if raw is None:
        return None
    m = model.dim_v
    if not (isinstance(raw, list) and len(raw) == m):
        raise ConfigError("/riccati_B0", f"expected {m} rows")
    rows = [_vector_from(row, f"/riccati_B0/{r}", m)
            for r, row in enumerate(raw)]
    B0 = np.stack(rows)
    if float(np.max(np.abs(B0 - B0.T))) > 1e-12:
        raise ConfigError("/riccati_B0", "matrix must be symmetric")
    return B0


def _lattice_from_config(model: ModelSpec, cfg: dict) -> SigmaLattice | None:
    """Optional generator list under /lattice/generators."""
    block = cfg.get("lattice")
    if block is None:
        return None
    if not isinstance(block, dict):
        raise ConfigError("/lattice", "expected an object")
    gens = block.get("generators")
    if not isinstance(gens, list):
        raise ConfigError("/lattice/generators", "expected an array")
    m = model.dim_v
    out = []
    for idx, item in enumerate(gens):
        ptr = f"/lattice/generators/{idx}"
        if not isinstance(item, dict):
            raise ConfigError(ptr, "expected an object with r, u0, w0")
        try:
            r = float(item.get("r", 0.0))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{ptr}/r", f"expected a number: {exc}") from exc
        u0 = _vector_from(item.get("u0"), f"{ptr}/u0", m)
        w0 = _vector_from(item.get("w0"), f"{ptr}/w0", m)
        out.append((r, HillSolution(model, u0, w0)))
    return SigmaLattice(model, tuple(out))


def _default_b0(model: ModelSpec) -> np.ndarray:
    # Any symmetric B0 spans a Lagrangian subspace; I/2 keeps the
    # default generators away from the trivial w0 = 0 ones.
    return 0.5 * np.eye(model.dim_v)


def _ball(rng, radius: float, m: int) -> np.ndarray:
    direction = rng.normal(size=m)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return np.zeros(m)
    return (radius * rng.random()) * direction / norm


def _random_point(rng, model: ModelSpec, t_scale: float = 1.0,
                  v_scale: float = 1.0) -> Point:
    p = model.period
    return Point(rng.uniform(-t_scale * p, t_scale * p),
                 rng.uniform(-1.0, 1.0),
                 rng.uniform(-v_scale, v_scale, model.dim_v))


def _random_element(rng, model: ModelSpec, k_lo: int = -2,
                    k_hi: int = 2) -> GroupElement:
    m = model.dim_v
    return GroupElement(model, int(rng.integers(k_lo, k_hi + 1)),
                        rng.uniform(-1.0, 1.0),
                        HillSolution(model, rng.uniform(-1, 1, m),
                                     rng.uniform(-1, 1, m)))


# -- per-command runners ----------------------------------------------------
# Each runner fills checks on the shared report (names prefixed when run
# under `all`), returns its payload and any extra figure thunks.

def run_model(model, cfg, args, rep, prefix=""):
    A = model.A
    rep.add(prefix + "A_symmetric", float(np.max(np.abs(A - A.T))), 1e-12)
    rep.add(prefix + "A_traceless", abs(float(np.trace(A))), 1e-12)
    rep.add_bool(prefix + "mode_requirements", True)  # enforced at build
    payload = {
        "n": model.n,
        "mode": model.mode,
        "period": model.period,
        "dim_v": model.dim_v,
        "eigenvalues": model.eigenvalues,
        "profile_nonconstant": model.fourier.nonconstant,
    }
    figures = {"profile": lambda path: profile_figure(model, path)}
    return payload, figures


def run_curvature(model, cfg, args, rep, prefix=""):
    rng = np.random.default_rng(args.seed)
    count = args.trials if args.trials else 8
    points = [_random_point(rng, model) for _ in range(count)]
    res = parallelism_residuals(model, points)
    wmag = weyl_magnitude(model, points)
    m = model.dim_v

    weyl_nonzero = wmag > WEYL_NONZERO_FLOOR
    olszak_vertical = olszak_excludes = None
    if model.mode == "strict":
        rep.add(prefix + "weyl_parallel", res.weyl_residual, WEYL_PARALLEL_TOL)
        rep.add_bool(prefix + "weyl_nonzero", weyl_nonzero)
        rep.add_bool(prefix + "riemann_not_parallel",
                     res.riemann_residual > RIEMANN_NONPARALLEL_FLOOR)
    else:
        if not model.fourier.nonconstant:
            rep.add(prefix + "riemann_parallel", res.riemann_residual,
                    RIEMANN_PARALLEL_TOL)
        rep.add(prefix + "weyl_parallel", res.weyl_residual, WEYL_PARALLEL_TOL)
    if weyl_nonzero:
        vertical_hits = transverse_misses = 0
        for p in points:
            if olszak_check(model, p, Tangent(p, 0.0, 1.0, np.zeros(m))):
                vertical_hits += 1
            bad_t = olszak_check(model, p, Tangent(p, 1.0, 0.0, np.zeros(m)))
            bad_v = olszak_check(model, p, Tangent(p, 0.0, 0.0, np.eye(m)[0]))
            if not bad_t and not bad_v:
                transverse_misses += 1
        olszak_vertical = vertical_hits / count
        olszak_excludes = transverse_misses / count
        rep.add_bool(prefix + "olszak_vertical", olszak_vertical == 1.0)
        rep.add_bool(prefix + "olszak_excludes_transverse",
                     olszak_excludes == 1.0)
    payload = {
        "samples": count,
        "weyl_nonzero": bool(weyl_nonzero),
        "weyl_magnitude": wmag,
        "weyl_parallel_residual": res.weyl_residual,
        "riemann_parallel_residual": res.riemann_residual,
        "olszak_pass_rate": olszak_vertical,
    }
    return payload, {}


def run_geodesic(model, cfg, args, rep, prefix=""):
    trials = args.trials if args.trials else 8
    horizon = args.horizon
    tol = args.tol if args.tol else GEODESIC_TOL
    try:
        probe = completeness_probe(model, trials=trials, horizon=horizon,
                                   seed=args.seed, tol=tol)
    except BlowUp as exc:
        rep.add_bool(prefix + "no_blow_up", False)
        return {"error": str(exc)}, {}
    rep.add_bool(prefix + "no_blow_up", True)
    rep.add(prefix + "energy_drift", probe["max_energy_drift"],
            ENERGY_DRIFT_TOL)
    rep.add_bool(prefix + "envelope_ok", probe["envelope_ok"])

    # Full integration against the reduced transverse system at tau = 50.
    rng = np.random.default_rng(args.seed + 1)
    m = model.dim_v
    reduced_dev = 0.0
    for _ in range(3):
        a = float(rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
        x0 = rng.uniform(-1, 1, m)
        xd0 = rng.uniform(-1, 1, m)
        base = Point(0.0, 0.0, x0)
        path = geodesic_integrate(model, base, Tangent(base, a, 0.0, xd0),
                                  (0.0, 50.0), tol=tol)
        red = reduced_system(model, a, x0, xd0, (0.0, 50.0))
        st = path.state_at(50.0)
        x_red, xd_red = red.at(50.0)
        reduced_dev = max(reduced_dev,
                          float(np.max(np.abs(st.base.v - x_red))),
                          float(np.max(np.abs(st.dv - xd_red))))
    rep.add(prefix + "reduced_agreement", reduced_dev, REDUCED_TOL)

    payload = dict(probe)
    payload["reduced_max_dev"] = reduced_dev

    def render(path):
        taus = np.linspace(-20.0, 20.0, 201)
        base = Point(0.0, 0.0, 0.3 * np.ones(m))
        tang = Tangent(base, 1.0, 0.2, 0.4 * np.eye(m)[0])
        sample = geodesic_integrate(model, base, tang, (-20.0, 20.0), tol=tol)
        vs = np.stack([sample.state_at(tau).base.v for tau in taus])
        energies = [sample.energy_at(tau) for tau in taus]
        return trajectory_figure(taus, vs, energies, path)

    return payload, {"trajectory": render}


def run_killing(model, cfg, args, rep, prefix=""):
    rng = np.random.default_rng(args.seed)
    count = args.trials if args.trials else 100
    p = model.period
    samples = [Point(rng.uniform(-3 * p, 3 * p), rng.uniform(-1, 1),
                     _ball(rng, 5.0, model.dim_v)) for _ in range(count)]

    residuals = {}
    catalog_worst = 0.0
    for fld in catalog_fields(model):
        r = killing_residual(model, fld, samples)
        residuals[fld.label] = r
        catalog_worst = max(catalog_worst, r)
    rep.add(prefix + "catalog_residual", catalog_worst, KILLING_TOL)

    basis = centralizer_basis(model.A)
    centralizer_worst = 0.0
    for i, F in enumerate(basis.elements):
        r = killing_residual(model, rotation_field(F), samples)
        residuals[f"X_F{i + 1}"] = r
        centralizer_worst = max(centralizer_worst, r)
    rep.add(prefix + "centralizer_residual", centralizer_worst, KILLING_TOL)

    detection = None
    try:
        bad = noncommuting_probe(model)
    except ValueError:
        bad = None
    if bad is not None:
        detection = killing_residual(model, bad, samples)
        rep.add_bool(prefix + "noncommuting_detected",
                     detection > DETECTION_FLOOR)

    F0 = basis.elements[0] if basis.dim else np.zeros_like(model.A)
    comm = commutator_check(model, F0, tol=KILLING_TOL)
    rep.add(prefix + "commutator_closed_forms",
            max(comm["max_dev_E"], comm["max_dev_E_star"], comm["max_dev_Z"]),
            KILLING_TOL)

    payload = {
        "samples": count,
        "fields": residuals,
        "dims": dims_report(model),
        "noncommuting_residual": detection,
        "commutator": comm,
    }
    return payload, {}


def run_group(model, cfg, args, rep, prefix=""):
    rng = np.random.default_rng(args.seed)
    count = args.trials if args.trials else 500
    m = model.dim_v
    e = g_identity(model)

    assoc = inverse = 0.0
    for _ in range(count):
        g1, g2, g3 = (_random_element(rng, model) for _ in range(3))
        assoc = max(assoc, element_gap(g_compose(g_compose(g1, g2), g3),
                                       g_compose(g1, g_compose(g2, g3))))
        inverse = max(inverse, element_gap(g_compose(g1, g_inverse(g1)), e),
                      element_gap(g_compose(g_inverse(g1), g1), e))
    rep.add(prefix + "associativity", assoc, GROUP_TOL)
    rep.add(prefix + "inverse", inverse, GROUP_TOL)

    compat = 0.0
    for _ in range(min(count, 200)):
        g1, g2 = _random_element(rng, model), _random_element(rng, model)
        pt = _random_point(rng, model)
        lhs = g_act(g1, g_act(g2, pt)).as_array()
        rhs = g_act(g_compose(g1, g2), pt).as_array()
        compat = max(compat, float(np.max(np.abs(lhs - rhs))))
    rep.add(prefix + "action_compatibility", compat, ACTION_TOL)

    isom = 0.0
    for _ in range(5):
        g = _random_element(rng, model)
        samples = []
        for _ in range(20):
            pt = _random_point(rng, model)
            samples.append((pt,
                            Tangent(pt, *rng.uniform(-1, 1, 2),
                                    rng.uniform(-1, 1, m)),
                            Tangent(pt, *rng.uniform(-1, 1, 2),
                                    rng.uniform(-1, 1, m))))
        isom = max(isom, isometry_residual(g, samples))
    rep.add(prefix + "isometry", isom, ISOMETRY_TOL)

    bridge = 0.0
    for _ in range(count):
        g1 = _random_element(rng, model, 0, 0)
        g2 = _random_element(rng, model, 0, 0)
        h = heis_bridge(g_compose(g1, g2))
        hm = heis_mul(heis_bridge(g1), heis_bridge(g2))
        bridge = max(bridge, float(np.max(np.abs(h.a - hm.a))),
                     float(np.max(np.abs(h.b - hm.b))), abs(h.c - hm.c))
    rep.add(prefix + "bridge_homomorphism", bridge, BRIDGE_TOL)

    basis = centralizer_basis(model.A)
    equivariance = None
    if basis.dim:
        F = basis.elements[0]
        equivariance = 0.0
        for _ in range(min(count, 200)):
            g = _random_element(rng, model, 0, 0)
            lhs = heis_bridge(rotation_automorphism(model, F, g))
            rhs = pi_automorphism(model, F, heis_bridge(g))
            equivariance = max(equivariance,
                               float(np.max(np.abs(lhs.a - rhs.a))),
                               float(np.max(np.abs(lhs.b - rhs.b))),
                               abs(lhs.c - rhs.c))
        rep.add(prefix + "rotation_equivariance", equivariance, BRIDGE_TOL)

    B0 = _b0_from_config(model, cfg)
    basis_sols = lagrangian_subspace(model, B0 if B0 is not None
                                     else _default_b0(model))
    abelian = 0.0
    for _ in range(count):
        coeffs = rng.uniform(-1, 1, (2, m))
        rs = rng.uniform(-1, 1, 2)
        gens = []
        for j in range(2):
            u0 = sum(c * w.u0 for c, w in zip(coeffs[j], basis_sols))
            w0 = sum(c * w.w0 for c, w in zip(coeffs[j], basis_sols))
            gens.append(GroupElement(model, 0, rs[j],
                                     HillSolution(model, u0, w0)))
        abelian = max(abelian, element_gap(g_compose(gens[0], gens[1]),
                                           g_compose(gens[1], gens[0])))
    rep.add(prefix + "lagrangian_abelian", abelian, GROUP_TOL)

    payload = {
        "sweeps": count,
        "associativity_residual": assoc,
        "inverse_residual": inverse,
        "action_residual": compat,
        "isometry_residual": isom,
        "bridge_residual": bridge,
        "equivariance_residual": equivariance,
        "abelian_residual": abelian,
    }

    lattice = _lattice_from_config(model, cfg)
    if lattice is not None:
        result = sigma_validate(lattice, B0=B0)
        rep.add_bool(prefix + "lattice_abelian", result["abelian_ok"])
        rep.add_bool(prefix + "lattice_in_L", result["in_L_ok"])
        payload["lattice"] = result
    return payload, {}


def run_holonomy(model, cfg, args, rep, prefix=""):
    m = model.dim_v
    tol = args.tol if args.tol else TRANSPORT_TOL

    lattice = _lattice_from_config(model, cfg)
    if lattice is not None:
        sigmas = [g for g in lattice.elements()]
    else:
        B0 = _b0_from_config(model, cfg)
        sols = lagrangian_subspace(model, B0 if B0 is not None
                                   else _default_b0(model))
        rng = np.random.default_rng(args.seed)
        count = args.trials if args.trials else 6
        sigmas = []
        for _ in range(count):
            c = rng.uniform(-1, 1, m)
            u0 = sum(ci * w.u0 for ci, w in zip(c, sols))
            w0 = sum(ci * w.w0 for ci, w in zip(c, sols))
            sigmas.append(GroupElement(model, 0, rng.uniform(-1, 1),
                                       HillSolution(model, u0, w0)))

    zero = HillSolution(model, np.zeros(m), np.zeros(m))
    generators = []
    sigma_dev = 0.0
    first_pair = None
    for sigma in sigmas:
        numeric = quotient_transport(model, sigma, tol)
        closed = closed_form_transport(model, sigma)
        dev = float(np.max(np.abs(numeric.matrix - closed.matrix)))
        sigma_dev = max(sigma_dev, dev)
        if first_pair is None:
            first_pair = (numeric.matrix, closed.matrix)
        generators.append({
            "sigma": {"k": 0, "x": sigma.x, "u0": sigma.u.u0,
                      "w0": sigma.u.w0},
            "matrix": numeric.matrix,
            "closed_form": closed.matrix,
            "max_dev": dev,
        })
    rep.add(prefix + "sigma_closed_form", sigma_dev, SIGMA_DEV_TOL)

    k_dev = 0.0
    eye = np.eye(m + 2)
    for k in (1, 2, -1):
        sigma = GroupElement(model, k, 0.0, zero)
        numeric = quotient_transport(model, sigma, tol)
        dev = float(np.max(np.abs(numeric.matrix - eye)))
        k_dev = max(k_dev, dev)
        generators.append({
            "sigma": {"k": k, "x": 0.0, "u0": zero.u0, "w0": zero.w0},
            "matrix": numeric.matrix,
            "closed_form": None,
            "max_dev": dev,
        })
    rep.add(prefix + "period_generators_identity", k_dev, K_IDENTITY_TOL)

    try:
        loops = holonomy_sampler(model, count=20, seed=args.seed, tol=tol)
        loops_ok = True
    except BlockViolation as exc:
        loops = exc.report
        loops_ok = False
    rep.add(prefix + "loop_vertical", loops["vertical_residual"],
            LOOP_VERTICAL_TOL)
    rep.add(prefix + "loop_rotation", loops["rotation_residual"],
            LOOP_ROTATION_TOL)
    rep.add_bool(prefix + "loops_in_shear_form", loops_ok)

    payload = {
        "generators": generators,
        "reduced_block_pass_rate": loops["pass_rate"],
        "resolved_sign_convention": resolved_sign(model),
        "loop_report": loops,
    }
    figures = {}
    if first_pair is not None:
        num, cf = first_pair
        figures["transport"] = lambda path: matrix_figure(
            {"numeric": num, "closed form": cf}, path,
            title="generator transport")
    return payload, figures


def run_dims(model, cfg, args, rep, prefix=""):
    report = dims_report(model)
    total = sum(m * (m - 1) // 2 for m in report["multiplicities"])
    rep.add(prefix + "dim_formula_match", abs(report["dim_s"] - total), 0.0)
    if model.mode == "strict":
        rep.add_bool(prefix + "trace_nonconstant", report["trace_nonconstant"])
    return dict(report), {}


_RUNNERS = [
    ("model", run_model),
    ("curvature", run_curvature),
    ("geodesic", run_geodesic),
    ("killing", run_killing),
    ("group", run_group),
    ("holonomy", run_holonomy),
    ("dims", run_dims),
]


def run_all(model, cfg, args, rep, prefix=""):
    payload = {}
    figures = {}
    for name, runner in _RUNNERS:
        sub_payload, sub_figures = runner(model, cfg, args, rep,
                                          prefix=prefix + name + "/")
        payload[name] = sub_payload
        for stem, render in sub_figures.items():
            figures[f"{name}_{stem}"] = render
    return payload, figures


# -- parser and driver ------------------------------------------------------

def _add_common(sub):
    sub.add_argument("config", help="model config (JSON)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trials", type=int, default=None,
                     help="sample count; each command has its own default")
    sub.add_argument("--horizon", type=float, default=1e3,
                     help="geodesic integration horizon")
    sub.add_argument("--tol", type=float, default=None,
                     help="integrator tolerance override")
    sub.add_argument("--out", default=None, help="write the JSON report here")
    sub.add_argument("--csv", default=None, help="write the check table here")
    sub.add_argument("--figures", default=None, metavar="DIR",
                     help="render PNG figures into this directory")
    sub.add_argument("--timing", action="store_true",
                     help="include wall time in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppwavelab",
        description="verification suite for the periodic plane-wave models")
    subs = parser.add_subparsers(dest="command", required=True)

    def leaf(sub, name, runner, label, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(runner=runner, label=label)
        return p

    model_p = subs.add_parser("model", help="model construction checks")
    model_sub = model_p.add_subparsers(dest="action", required=True)
    leaf(model_sub, "validate", run_model, "model validate",
         "build the model and report its shape")

    curv_p = subs.add_parser("curvature", help="curvature tensor checks")
    curv_sub = curv_p.add_subparsers(dest="action", required=True)
    leaf(curv_sub, "verify", run_curvature, "curvature verify",
         "parallelism and degenerate-direction checks")

    geo_p = subs.add_parser("geodesic", help="completeness probe")
    geo_sub = geo_p.add_subparsers(dest="action", required=True)
    leaf(geo_sub, "probe", run_geodesic, "geodesic probe",
         "long-horizon integration with energy and envelope gates")

    kil_p = subs.add_parser("killing", help="symmetry algebra checks")
    kil_sub = kil_p.add_subparsers(dest="action", required=True)
    leaf(kil_sub, "verify", run_killing, "killing verify",
         "catalog residuals, centralizer, commutators")

    grp_p = subs.add_parser("group", help="transformation group checks")
    grp_sub = grp_p.add_subparsers(dest="action", required=True)
    leaf(grp_sub, "verify", run_group, "group verify",
         "group law sweeps, bridge, lattice validation")

    hol_p = subs.add_parser("holonomy", help="transport computations")
    hol_sub = hol_p.add_subparsers(dest="action", required=True)
    leaf(hol_sub, "compute", run_holonomy, "holonomy compute",
         "generator transports and loop sampling")

    leaf(subs, "dims", run_dims, "dims", "symmetry dimension counts")
    leaf(subs, "all", run_all, "all", "every check in sequence")
    return parser


def _execute(args) -> int:
    start = time.perf_counter()
    cfg = _load_config(args.config)
    model = model_from_config(cfg)
    rep = RunReport(command=args.label, fingerprint=config_fingerprint(cfg),
                    seed=args.seed)
    payload, figures = args.runner(model, cfg, args, rep)
    rep.payload = payload
    rep.wall_time = time.perf_counter() - start

    doc = rep.to_json(timing=args.timing)
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    if args.csv:
        header, rows = rep.table()
        write_csv(args.csv, header, rows)
    if args.figures:
        directory = Path(args.figures)
        directory.mkdir(parents=True, exist_ok=True)
        residual_figure(rep.checks, directory / "checks.png",
                        title=f"{args.label}: check residuals")
        for stem, render in figures.items():
            render(directory / f"{stem}.png")
    return 0 if rep.passed else 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _execute(args)
    except (ConfigError, ModelValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3
    except PpwaveError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001  (CLI boundary)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

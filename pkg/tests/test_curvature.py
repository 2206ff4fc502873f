"""Curvature tensors against their closed forms.

For this metric the whole Riemann tensor is generated by

    R_{itjt} = -(f(t) delta_ij + A_ij)

together with its index symmetries, the Ricci tensor has the single
entry Ric_tt = -(n-2) f(t), the scalar curvature vanishes, and the Weyl
tensor is the f-free part W_{itjt} = -A_ij. The package computes all of
this from Christoffel symbols without knowing the closed form; the tests
know it.
"""

import numpy as np
import pytest

from ppwavelab.curvature import (curvature_at, olszak_check,
                                 olszak_deviation, parallelism_residuals,
                                 weyl_magnitude)
from ppwavelab.model import (Point, Tangent, inverse_metric_components,
                             metric_components)

from conftest import A5_PINNED


def sample_points(model, count=5, seed=2):
    rng = np.random.default_rng(seed)
    p = model.period
    return [Point(rng.uniform(-p, p), rng.uniform(-1, 1),
                  rng.uniform(-1, 1, model.dim_v)) for _ in range(count)]


def generated_tensor(n, q):
    """The rank-4 array with R_{itjt} = q_ij and all its symmetries."""
    out = np.zeros((n,) * 4)
    for i in range(n - 2):
        for j in range(n - 2):
            a, c = 2 + i, 2 + j
            out[a, 0, c, 0] = q[i, j]
            out[0, a, c, 0] = -q[i, j]
            out[a, 0, 0, c] = -q[i, j]
            out[0, a, 0, c] = q[i, j]
    return out


def test_riemann_matches_closed_form(pinned5):
    for pt in sample_points(pinned5):
        want = generated_tensor(5, -(pinned5.f(pt.t) * np.eye(3) + A5_PINNED))
        got = curvature_at(pinned5, pt).riemann
        assert np.max(np.abs(got - want)) < 1e-12


def test_weyl_is_the_profile_free_part(pinned5):
    for pt in sample_points(pinned5, seed=3):
        want = generated_tensor(5, -A5_PINNED)
        got = curvature_at(pinned5, pt).weyl
        assert np.max(np.abs(got - want)) < 1e-12


def test_ricci_and_scalar(pinned5):
    for pt in sample_points(pinned5, seed=4):
        bundle = curvature_at(pinned5, pt)
        want = np.zeros((5, 5))
        want[0, 0] = -3.0 * pinned5.f(pt.t)
        assert np.max(np.abs(bundle.ricci - want)) < 1e-12
        assert abs(bundle.scalar) < 1e-12


def test_riemann_symmetries_and_bianchi(strict6):
    pt = Point(0.4, 0.1, np.array([0.3, -0.5, 0.2, 0.6]))
    R = curvature_at(strict6, pt).riemann
    assert np.max(np.abs(R + np.swapaxes(R, 0, 1))) < 1e-12
    assert np.max(np.abs(R + np.swapaxes(R, 2, 3))) < 1e-12
    assert np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))) < 1e-12
    cyclic = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(cyclic)) < 1e-12


def test_weyl_is_trace_free(strict6):
    pt = Point(-0.3, 0.0, np.array([0.2, 0.4, -0.1, 0.5]))
    W = curvature_at(strict6, pt).weyl
    ginv = inverse_metric_components(strict6, pt)
    trace = np.einsum("ac,abcd->bd", ginv, W)
    assert np.max(np.abs(trace)) < 1e-12


# -- parallelism ------------------------------------------------------------

def test_strict_model_weyl_parallel_riemann_not(pinned5):
    res = parallelism_residuals(pinned5, sample_points(pinned5, count=4))
    assert res.weyl_residual < 1e-5
    assert res.riemann_residual > 1e-4
    assert weyl_magnitude(pinned5, sample_points(pinned5, count=2)) > 0.1


def test_riemann_derivative_is_profile_slope(pinned5):
    """At v = 0 all Christoffels vanish, so nabla R reduces to the bare
    t-derivative and its largest component is |f'(t)|."""
    t0 = 0.5
    res = parallelism_residuals(pinned5, [Point(t0, 0.0, np.zeros(3))])
    assert res.riemann_residual == pytest.approx(abs(pinned5.f(t0, 1)),
                                                 abs=1e-5)


def test_constant_profile_is_locally_symmetric(relaxed_sym):
    res = parallelism_residuals(relaxed_sym, sample_points(relaxed_sym))
    assert res.riemann_residual < 1e-5
    assert res.weyl_residual < 1e-5
    assert weyl_magnitude(relaxed_sym, sample_points(relaxed_sym)) > 0.1


def test_flat_operator_kills_weyl(relaxed_flat):
    pts = sample_points(relaxed_flat)
    assert weyl_magnitude(relaxed_flat, pts) < 1e-13
    bundle = curvature_at(relaxed_flat, pts[0])
    # f is a nonzero constant, so the space is curved but symmetric.
    assert np.max(np.abs(bundle.riemann)) > 0.1
    assert np.max(np.abs(bundle.weyl)) < 1e-13


def test_step_parameter_is_validated(pinned5):
    pts = [Point(0.0, 0.0, np.zeros(3))]
    with pytest.raises(ValueError):
        parallelism_residuals(pinned5, pts, step=0.0)
    with pytest.raises(ValueError):
        parallelism_residuals(pinned5, pts, step=2e-3)


def test_fd_step_refinement_is_consistent(pinned5):
    pts = [Point(0.7, 0.2, np.array([0.4, -0.3, 0.1]))]
    coarse = parallelism_residuals(pinned5, pts, step=1e-3).riemann_residual
    fine = parallelism_residuals(pinned5, pts, step=1e-4).riemann_residual
    assert abs(coarse - fine) < 1e-4
    assert fine == pytest.approx(coarse, rel=1e-3)


# -- the degenerate direction -----------------------------------------------

def test_olszak_distribution_is_the_vertical_line(pinned5):
    for pt in sample_points(pinned5, count=4, seed=8):
        vertical = Tangent(pt, 0.0, 1.0, np.zeros(3))
        assert olszak_check(pinned5, pt, vertical)
        assert olszak_deviation(pinned5, pt, vertical) < 1e-13
        assert not olszak_check(pinned5, pt, Tangent(pt, 1.0, 0.0, np.zeros(3)))
        for i in range(3):
            e = np.eye(3)[i]
            assert not olszak_check(pinned5, pt, Tangent(pt, 0.0, 0.0, e))


def test_olszak_deviation_scales_with_the_vector(pinned5):
    pt = Point(0.3, 0.0, np.array([0.5, 0.1, -0.2]))
    u = Tangent(pt, 1.0, 0.2, np.array([0.3, -0.4, 0.1]))
    one = olszak_deviation(pinned5, pt, u)
    two = olszak_deviation(pinned5, pt,
                           Tangent(pt, 2.0, 0.4, 2.0 * np.asarray(u.dv)))
    assert two == pytest.approx(2.0 * one, rel=1e-12)


def test_everything_degenerates_when_weyl_vanishes(relaxed_flat):
    pt = Point(0.2, 0.0, np.array([0.4, 0.1, 0.3]))
    # With W = 0 the wedge criterion cannot single out a direction.
    assert olszak_check(relaxed_flat, pt, Tangent(pt, 1.0, 0.0, np.zeros(3)))

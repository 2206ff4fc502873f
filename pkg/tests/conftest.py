"""Shared model fixtures.

Scales are deliberate: the O(1) models separate the curvature classes
(|f'| comfortably above the non-parallelism floor) while the 1e-7 ones
keep transverse solutions representable over the tau = 1e3 completeness
horizon. Operators come in two flavors: hand-pinned matrices for tests
that compare against frozen reference numbers (portable across BLAS
builds), and seeded random conjugations of diagonals for residual-style
sweeps where any orthogonal frame must work.
"""

import numpy as np
import pytest

from ppwavelab.fourier import FourierSeries
from ppwavelab.model import build_model

# Pinned operator for frozen-value tests; symmetric, trace zero.
A5_PINNED = np.array([
    [0.22, 0.12, -0.06],
    [0.12, 0.01, 0.10],
    [-0.06, 0.10, -0.23],
])

# Profile shared by the n = 5 fixtures: period 2, two harmonics.
F5 = dict(period=2.0, a0=0.1, modes=((0.2, 0.0), (0.0, 0.05)))


def conjugated_operator(seed, lams):
    """Q diag(lams) Q^T for a seeded random orthogonal Q."""
    lams = np.asarray(lams, dtype=float)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(lams.size, lams.size)))
    return Q @ np.diag(lams) @ Q.T


@pytest.fixture(scope="session")
def pinned5():
    return build_model(5, FourierSeries(**F5), A5_PINNED)


@pytest.fixture(scope="session")
def diag5():
    # Diagonal operator: eigenvectors are the coordinate axes, so the
    # period map decomposes into the frozen scalar blocks exactly.
    return build_model(5, FourierSeries(**F5), np.diag([0.3, 0.3, -0.6]))


@pytest.fixture(scope="session")
def strict5():
    return build_model(5, FourierSeries(**F5),
                       conjugated_operator(5, (0.3, 0.3, -0.6)))


@pytest.fixture(scope="session")
def strict6():
    return build_model(6, FourierSeries(period=1.5, a0=-0.05,
                                        modes=((0.15, 0.1),)),
                       conjugated_operator(6, (0.25, 0.25, 0.25, -0.75)))


@pytest.fixture(scope="session")
def strict8():
    return build_model(8, FourierSeries(period=2.5, a0=0.2,
                                        modes=((0.1, 0.0), (0.05, 0.02))),
                       conjugated_operator(8, (0.2,) * 5 + (-1.0,)))


@pytest.fixture(scope="session")
def generic5():
    # Distinct eigenvalues: trivial centralizer.
    return build_model(5, FourierSeries(**F5),
                       conjugated_operator(7, (0.1, 0.3, -0.4)))


def weak_model(n, seed, lams, scale=1e-7):
    lams = scale * np.asarray(lams, dtype=float)
    fourier = FourierSeries(period=2.0, a0=scale, modes=((2.0 * scale, 0.0),))
    return build_model(n, fourier, conjugated_operator(seed, lams))


@pytest.fixture(scope="session")
def weak5():
    return weak_model(5, 50, (1.0, 1.0, -2.0))


@pytest.fixture(scope="session")
def weak6():
    return weak_model(6, 60, (1.0, 1.0, 1.0, -3.0))


@pytest.fixture(scope="session")
def weak8():
    return weak_model(8, 80, (1.0,) * 5 + (-5.0,))


@pytest.fixture(scope="session")
def relaxed_sym():
    # Constant profile, A != 0: locally symmetric, not flat.
    return build_model(5, FourierSeries(period=2.0, a0=0.25, modes=()),
                       A5_PINNED, mode="relaxed")


@pytest.fixture(scope="session")
def relaxed_flat():
    # Constant profile and A = 0.
    return build_model(5, FourierSeries(period=2.0, a0=0.15, modes=()),
                       np.zeros((3, 3)), mode="relaxed")


@pytest.fixture(scope="session")
def free5():
    # f = 0, A = 0: every transverse solution is a straight line.
    return build_model(5, FourierSeries(period=2.0, a0=0.0, modes=()),
                       np.zeros((3, 3)), mode="relaxed")


@pytest.fixture(scope="session")
def const5():
    # f = 0.49, A = 0: scalar blocks solve u'' = 0.49 u exactly.
    return build_model(5, FourierSeries(period=2.0, a0=0.49, modes=()),
                       np.zeros((3, 3)), mode="relaxed")

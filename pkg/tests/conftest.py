import math

import pytest

import weylaudit as w

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def square_torus():
    return w.FlatTorus.square(2, TWO_PI)


@pytest.fixture(scope="session")
def torus100(square_torus):
    return w.torus_spectrum(square_torus, 100.0)


@pytest.fixture(scope="session")
def torus300(square_torus):
    return w.torus_spectrum(square_torus, 300.0)


@pytest.fixture(scope="session")
def sphere100():
    return w.sphere_spectrum(w.RoundSphere(2), 100.0)


@pytest.fixture(scope="session")
def plateau():
    return w.build_plateau_kernel()


@pytest.fixture(scope="session")
def nonneg_deep():
    return w.build_nonneg_kernel(tail_threshold=1e-18)


@pytest.fixture(scope="session")
def tauberian(nonneg_deep):
    return w.tauberian_kernel(nonneg_deep)


@pytest.fixture(scope="session")
def torus_wide(square_torus, plateau):
    """Deep spectrum so scale-1 plateau convolutions at lambda <= 150 are
    complete (reach is the kernel cutoff, ~579)."""
    return w.torus_spectrum(square_torus, 151.0 + plateau.t_cut)

import mpmath as mp
import pytest

from qhilab.precision import PrecisionContext
from qhilab import gluing


@pytest.fixture(autouse=True)
def _test_dps():
    """Test-side arithmetic (differences, moduli) at a precision safely
    above every context used in the suite."""
    old = mp.mp.dps
    mp.mp.dps = 60
    yield
    mp.mp.dps = old


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(digits=30)


@pytest.fixture(scope="session")
def ctx_quad():
    return PrecisionContext(digits=26, quad_rel_tol=1e-10)


@pytest.fixture(scope="session")
def complete(ctx):
    return gluing.complete_point(ctx)


@pytest.fixture(scope="session")
def colors_a(ctx):
    return gluing.colors_from_weights(4, 2j * mp.pi, 0, ctx)


@pytest.fixture(scope="session")
def colors_b(ctx):
    return gluing.colors_from_weights(4, 4j * mp.pi, 0, ctx)


@pytest.fixture(scope="session")
def volume(ctx):
    from qhilab.dilog import figure_eight_volume
    return figure_eight_volume(ctx)

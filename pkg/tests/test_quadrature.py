import mpmath as mp
import pytest

from qhilab.errors import NonConvergent
from qhilab.precision import PrecisionContext
from qhilab.quadrature import (gauss_legendre_nodes, integrate_polyline,
                               integrate_segment)

CTX = PrecisionContext(digits=30)


def test_nodes_integrate_polynomials_exactly():
    order = 12
    nodes, weights = gauss_legendre_nodes(order, 30)
    # exact for degree <= 2*order - 1
    for k in (0, 3, 10, 2 * order - 1):
        val = mp.fsum(w * x ** k for x, w in zip(nodes, weights))
        exact = mp.mpf(2) / (k + 1) if k % 2 == 0 else mp.mpf(0)
        assert abs(val - exact) < mp.mpf("1e-28")


def test_segment_matches_mpmath():
    f = lambda z: mp.exp(z) * mp.cos(3 * z)
    got = integrate_segment(f, 0, 2, 4, 14, 30)
    ref = mp.quad(f, [0, 2])
    assert abs(got - ref) < mp.mpf("1e-24")


def test_polyline_residue():
    val = integrate_polyline(lambda z: 1 / z, [1, 1j, -1, -1j, 1], CTX)
    assert abs(val - 2j * mp.pi) < mp.mpf("1e-24")


def test_closed_entire_integrand_vanishes():
    val = integrate_polyline(lambda z: z * z, [1, 1j, -1, -1j, 1], CTX)
    assert abs(val) < mp.mpf("1e-24")


def test_nonconvergent_on_pole_through_segment():
    with pytest.raises(NonConvergent):
        integrate_polyline(lambda z: 1 / (z - mp.mpf("0.3")), [0, 1], CTX,
                           max_doublings=4)

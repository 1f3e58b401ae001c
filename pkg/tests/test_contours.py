import mpmath as mp
import pytest

from qhilab.contours import (Contour, contour_integral, oscillation_panels,
                             segment_point_distance)
from qhilab.errors import ContourInvalid, PoleOnContour
from qhilab.precision import PrecisionContext

CTX = PrecisionContext(digits=30)


def test_segment_point_distance():
    assert abs(segment_point_distance(0, 2, 1 + 1j) - 1) < mp.mpf("1e-25")
    assert abs(segment_point_distance(0, 2, 3) - 1) < mp.mpf("1e-25")


def test_cut_crossing_rejected():
    c = Contour([-1 - 1j, -1 + 1j, 1 + 1j, 1 - 1j],
                cuts=[mp.mpc(0)])
    with pytest.raises(ContourInvalid):
        c.validate(CTX)


def test_cut_leftward_passage_allowed():
    # crossing the cut line strictly left of the anchor is fine
    c = Contour([-2 - 1j, -2 + 1j], cuts=[mp.mpc(0)])
    c.validate(CTX)


def test_endpoint_on_anchor_allowed():
    c = Contour([1j, mp.mpc(0), -1], cuts=[mp.mpc(0)])
    c.validate(CTX)


def test_pole_proximity_rejected():
    c = Contour([0, 1], poles=[mp.mpc("0.5", "1e-20")])
    with pytest.raises(PoleOnContour):
        c.validate(CTX)
    # generous clearance demand
    c2 = Contour([0, 1], poles=[mp.mpc("0.5", "0.01")])
    with pytest.raises(PoleOnContour):
        c2.validate(CTX, pole_clearance=0.1)
    c2.validate(CTX)  # default tolerance is fine


def test_contour_integral_refuses_invalid():
    c = Contour([-1 - 1j, -1 + 1j, 1 + 1j, 1 - 1j], cuts=[mp.mpc(0)])
    with pytest.raises(ContourInvalid):
        contour_integral(lambda z: z, c, CTX)


def test_residue_through_square():
    c = Contour([1, 1j, -1, -1j, 1])
    val = contour_integral(lambda z: 1 / z, c, CTX)
    assert abs(val - 2j * mp.pi) < mp.mpf("1e-24")


def test_panels_scale_with_n():
    verts = [mp.mpc(0, 0.1), mp.mpc(0, 6.0)]
    p_small = oscillation_panels(verts, 15)[0]
    p_big = oscillation_panels(verts, 601)[0]
    assert p_big > 4 * p_small


def test_json_serialization():
    c = Contour([0, 1j], cuts=[mp.mpc(0)], poles=[2j])
    data = c.to_json_dict()
    assert len(data["vertices"]) == 2
    assert data["cuts"] and data["poles"]


def test_length():
    c = Contour([0, 3, 3 + 4j])
    assert abs(c.length() - 7) < mp.mpf("1e-25")

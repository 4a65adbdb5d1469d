from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from rprcusps.errors import CollinearBase, DegenerateLeg, NonPositiveSide, TriangleInequalityViolated
from rprcusps.geometry import (
    SlicePose,
    configuration_from_pose,
    constraint_residuals,
    exact_number,
    leg_lengths,
    platform_vertices,
    pose_from_vertices,
    pose_to_joints,
    validate_geometry,
    wrap_angle,
)
from rprcusps.polysolve import to_mpf, working_precision

from conftest import M1, M2


def test_decimal_input_is_exact():
    assert exact_number(15.91) == Fraction(1591, 100)
    assert exact_number("0.1") == Fraction(1, 10)
    assert exact_number(3) == 3


def test_bool_rejected():
    with pytest.raises(TypeError):
        exact_number(True)


@pytest.mark.parametrize(
    "change, exc",
    [
        ({"d1": 0}, NonPositiveSide),
        ({"d2": -1}, NonPositiveSide),
        ({"d1": 1, "d2": 1, "d3": 5}, TriangleInequalityViolated),
        ({"a3y": 0}, CollinearBase),
        ({"a2x": 0}, CollinearBase),
    ],
)
def test_invalid_geometry(change, exc):
    with pytest.raises(exc):
        validate_geometry(M1, **change)


def test_missing_field():
    with pytest.raises(KeyError):
        validate_geometry({"a2x": 1})


def test_flat_platform_accepted():
    g = validate_geometry(M2)
    with working_precision(50):
        assert abs(g.sin_beta) < mp.mpf(10) ** -40
        assert g.h == 0


def test_platform_sides_match():
    g = validate_geometry(M1)
    with working_precision(50):
        b1, b2, b3 = platform_vertices(g, SlicePose(14.98, mp.mpf("0.3"), mp.mpf("-1.1")))
        d = lambda p, q: mp.hypot(p[0] - q[0], p[1] - q[1])
        assert abs(d(b1, b2) - g.value("d1")) < mp.mpf(10) ** -45
        assert abs(d(b2, b3) - g.value("d2")) < mp.mpf(10) ** -45
        assert abs(d(b3, b1) - g.value("d3")) < mp.mpf(10) ** -45


angles = st.floats(min_value=-3.1, max_value=3.1, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(alpha=angles, theta1=angles, l1=st.floats(min_value=1, max_value=40))
def test_pose_round_trip(alpha, theta1, l1):
    g = validate_geometry(M1)
    with working_precision(40):
        pose = SlicePose(l1, alpha, theta1)
        cfg = configuration_from_pose(g, pose)
        assert max(abs(r) for r in constraint_residuals(g, cfg)) < mp.mpf(10) ** -30
        b1, b2, _ = platform_vertices(g, pose)
        back = pose_from_vertices(g, b1, b2)
        assert abs(wrap_angle(back.alpha - to_mpf(alpha))) < mp.mpf(10) ** -30
        assert abs(wrap_angle(back.theta1 - to_mpf(theta1))) < mp.mpf(10) ** -30


def test_degenerate_leg_keeps_lengths():
    g = validate_geometry(M1)
    with working_precision(40):
        # put B2 exactly on A2
        # a2x < d1, so B1 sits on the negative x axis and the platform points along +x
        pose = SlicePose(g.value("d1") - g.value("a2x"), mp.zero, mp.pi)
        l2, _ = leg_lengths(g, pose)
        assert l2 < mp.mpf(10) ** -30
        with pytest.raises(DegenerateLeg) as info:
            pose_to_joints(g, pose)
        assert info.value.l2 is not None and info.value.legs == ("L2",)


def test_wrap_angle_range():
    with working_precision(30):
        assert wrap_angle(mp.pi) == mp.pi
        assert wrap_angle(-mp.pi) == mp.pi
        assert abs(wrap_angle(3 * mp.pi / 2) + mp.pi / 2) < mp.mpf(10) ** -25

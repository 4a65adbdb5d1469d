import random

import pytest
from mpmath import mp

from rprcusps.geometry import SlicePose, configuration_from_pose, validate_geometry
from rprcusps.halfangle import HalfExpr, cusp_expr, singularity_expr, slice_map_cusp_expr
from rprcusps.kinematics import cusp_form, singularity_residual
from rprcusps.polysolve import working_precision

from conftest import M1, M2, SIMILAR

DIGITS = 60


def _points(seed, n=8):
    rng = random.Random(seed)
    return [(mp.mpf(rng.uniform(-3, 3)), mp.mpf(rng.uniform(-3, 3))) for _ in range(n)]


def _half(a, th):
    return mp.tan(a / 2), mp.tan(th / 2)


def test_basis_values():
    with working_precision(DIGITS):
        a, th = mp.mpf("0.7"), mp.mpf("-1.3")
        t, t1 = _half(a, th)
        assert abs(HalfExpr.cos_alpha().value(t, t1) - mp.cos(a)) < mp.mpf(10) ** -55
        assert abs(HalfExpr.sin_alpha().value(t, t1) - mp.sin(a)) < mp.mpf(10) ** -55
        assert abs(HalfExpr.cos_theta1().value(t, t1) - mp.cos(th)) < mp.mpf(10) ** -55
        assert abs(HalfExpr.sin_theta1().value(t, t1) - mp.sin(th)) < mp.mpf(10) ** -55
        e = HalfExpr.cos_alpha() * HalfExpr.sin_theta1() + 2
        assert abs(e.raised(3, 2).value(t, t1) - e.value(t, t1)) < mp.mpf(10) ** -55


@pytest.mark.parametrize("raw", [M1, M2, SIMILAR])
def test_singularity_expr_matches_trig(raw):
    g = validate_geometry(raw)
    with working_precision(DIGITS):
        l1 = mp.mpf("14.98")
        f = singularity_expr(g, l1)
        for a, th in _points(1):
            cfg = configuration_from_pose(g, SlicePose(l1, a, th))
            want = cfg.L[1] * cfg.L[2] * singularity_residual(g, cfg.theta)
            got = f.value(*_half(a, th))
            assert abs(got - want) <= mp.mpf(10) ** -50 * (1 + abs(want))


@pytest.mark.parametrize("raw", [M1, SIMILAR])
def test_cusp_expr_matches_trig(raw):
    g = validate_geometry(raw)
    with working_precision(DIGITS):
        l1 = mp.mpf("27")
        e = cusp_expr(g, l1)
        for a, th in _points(2):
            cfg = configuration_from_pose(g, SlicePose(l1, a, th))
            want = cusp_form(g, cfg)
            got = e.value(*_half(a, th))
            assert abs(got - want) <= mp.mpf(10) ** -45 * (1 + abs(want))


@pytest.mark.parametrize("raw", [M1, M2])
def test_slice_map_determinant_is_constant_multiple(raw):
    g = validate_geometry(raw)
    with working_precision(DIGITS):
        l1 = mp.mpf(3)
        det, _ = slice_map_cusp_expr(g, l1)
        f = singularity_expr(g, l1)
        ratios = [det.value(*_half(a, th)) / f.value(*_half(a, th)) for a, th in _points(3)]
        for r in ratios[1:]:
            assert abs(r - ratios[0]) < mp.mpf(10) ** -45 * abs(ratios[0])


def test_slice_map_condition_vanishes_at_cusps(slice_result):
    res = slice_result("m1", "14.98")
    g = validate_geometry(M1)
    with working_precision(90):
        det, cond = slice_map_cusp_expr(g, mp.mpf("14.98"))
        for c in res.cusps:
            t, t1 = _half(c.alpha, c.theta1)
            scale = cond.num.map_abs()(abs(t), abs(t1))
            assert abs(cond.num(t, t1)) / scale < mp.mpf(10) ** -40

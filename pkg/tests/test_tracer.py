import math
import xml.dom.minidom

import pytest
from mpmath import mp

from rprcusps.geometry import SlicePose, configuration_from_pose, platform_vertices, pose_from_vertices, validate_geometry
from rprcusps.kinematics import singularity_residual
from rprcusps.polysolve import working_precision
from rprcusps.tracer import SingularCurveSlice, curve_rows, emit_plot, trace_slice

from conftest import M1, M2


@pytest.fixture(scope="module")
def m1_curves(m1):
    return {n: trace_slice(m1, "14.98", n) for n in (180, 360)}


def _seg_dist(p, a, b):
    ax, ay = b[0] - a[0], b[1] - a[1]
    L = ax * ax + ay * ay
    s = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / L))
    return math.hypot(p[0] - a[0] - s * ax, p[1] - a[1] - s * ay)


def _dist_to_curves(curves, p):
    best = math.inf
    for br in curves.branches:
        pts = [(q.l2, q.l3) for q in br]
        if len(pts) == 1:
            best = min(best, math.hypot(p[0] - pts[0][0], p[1] - pts[0][1]))
        for a, b in zip(pts, pts[1:]):
            best = min(best, _seg_dist(p, a, b))
    return best


def test_rejects_coarse_sampling(m1):
    with pytest.raises(ValueError):
        trace_slice(m1, 3, 8)


def test_points_lie_on_singular_curve(m1, m1_curves):
    curves = m1_curves[180]
    with working_precision(30):
        for br in curves.branches:
            for p in br[::7]:
                cfg = configuration_from_pose(m1, SlicePose(14.98, p.alpha, p.theta1))
                assert abs(singularity_residual(m1, cfg.theta)) < 1e-9
                assert abs(float(cfg.L[1]) - p.l2) < 1e-9 and abs(float(cfg.L[2]) - p.l3) < 1e-9


def test_cusps_lie_on_traced_curves(m1_curves, slice_result):
    for c in slice_result("m1", "14.98").cusps:
        assert _dist_to_curves(m1_curves[360], (float(c.l2), float(c.l3))) < 1e-2


def test_doubling_samples(m1_curves):
    def max_gap(curves):
        return max(
            max(abs(a.alpha - b.alpha), abs(math.remainder(a.theta1 - b.theta1, 2 * math.pi)))
            for br in curves.branches
            for a, b in zip(br, br[1:])
            if abs(a.alpha - b.alpha) < math.pi
        )

    coarse, fine = m1_curves[180], m1_curves[360]
    assert len(coarse.branches) == len(fine.branches)
    assert max_gap(fine) < max_gap(coarse)


def test_branch_count_stable_on_other_slices(m1, m2):
    for geom, l1 in ((m1, 34), (m1, 27), (m2, 3)):
        counts = {len(trace_slice(geom, l1, n).branches) for n in (180, 360)}
        assert len(counts) == 1


def _parallel_leg_poses(geom, l1):
    """Slice poses with all three legs parallel, found by a scan over the common leg direction."""
    A2 = (geom.value("a2x"), mp.zero)
    A3 = (geom.value("a3x"), geom.value("a3y"))
    d1, d2, d3 = geom.value("d1"), geom.value("d2"), geom.value("d3")

    def offsets(A, d, u):
        # s with |A + s u| = d
        b = A[0] * u[0] + A[1] * u[1]
        disc = b * b - (A[0] ** 2 + A[1] ** 2 - d * d)
        if disc < 0:
            return []
        return [-b - mp.sqrt(disc), -b + mp.sqrt(disc)]

    def g(phi, i, j):
        u = (mp.cos(phi), mp.sin(phi))
        ss, rr = offsets(A2, d1, u), offsets(A3, d3, u)
        if not ss or not rr:
            return None
        k = rr[j] - ss[i]
        return (A3[0] - A2[0] + k * u[0]) ** 2 + (A3[1] - A2[1] + k * u[1]) ** 2 - d2 * d2

    poses = []
    n = 720
    for i in range(2):
        for j in range(2):
            prev = None
            for k in range(n + 1):
                phi = 2 * mp.pi * k / n
                val = g(phi, i, j)
                if val is not None and prev is not None and prev[1] * val < 0:
                    root = mp.findroot(lambda x: g(x, i, j), (prev[0], phi), solver="anderson")
                    u = (mp.cos(root), mp.sin(root))
                    b1 = (l1 * u[0], l1 * u[1])
                    s = offsets(A2, d1, u)[i]
                    b2 = (A2[0] + (l1 + s) * u[0], A2[1] + (l1 + s) * u[1])
                    pose = pose_from_vertices(geom, b1, b2)
                    r = offsets(A3, d3, u)[j]
                    b3 = (A3[0] + (l1 + r) * u[0], A3[1] + (l1 + r) * u[1])
                    got = platform_vertices(geom, pose)[2]
                    # keep only the platform orientation that matches beta
                    if mp.hypot(got[0] - b3[0], got[1] - b3[1]) < mp.mpf(10) ** -20:
                        poses.append(pose)
                prev = (phi, val) if val is not None else None
    return poses


def test_parallel_legs_poses_are_traced(m1, m1_curves):
    with working_precision(40):
        poses = _parallel_leg_poses(m1, mp.mpf("14.98"))
    assert poses
    curves = m1_curves[360]
    step = 2 * math.pi / 360
    for pose in poses:
        a, th = float(pose.alpha), float(pose.theta1)
        d = min(
            max(abs(math.remainder(p.alpha - a, 2 * math.pi)), abs(math.remainder(p.theta1 - th, 2 * math.pi)))
            for br in curves.branches
            for p in br
        )
        assert d < 3 * step


def test_curve_rows(m1_curves):
    rows = curve_rows(m1_curves[180])
    assert len(rows) == m1_curves[180].point_count
    assert {r[4] for r in rows} == set(range(len(m1_curves[180].branches)))


def test_empty_plot_is_valid():
    svg = emit_plot(SingularCurveSlice(l1=3.0, branches=[]), [])
    doc = xml.dom.minidom.parseString(svg)
    assert doc.documentElement.tagName == "svg"
    assert not doc.getElementsByTagName("polyline")
    assert "L2" in svg and "L3" in svg and "L1 = 3" in svg


def _markers(svg):
    doc = xml.dom.minidom.parseString(svg)
    return [c for c in doc.getElementsByTagName("circle") if c.getAttribute("r") == "7"]


def test_plot_of_first_slice(m1_curves, slice_result):
    cusps = slice_result("m1", "14.98").cusps
    svg = emit_plot(m1_curves[360], cusps)
    assert len(_markers(svg)) == 6
    assert svg == emit_plot(m1_curves[360], cusps)
    assert any(abs(float(c.l2) - 0.84) < 0.02 and abs(float(c.l3) - 3.77) < 0.02 for c in cusps)


def test_plot_of_flat_platform(m2, slice_result):
    cusps = slice_result("m2", "3").cusps
    svg = emit_plot(trace_slice(m2, 3, 180), cusps)
    assert len(_markers(svg)) == 4

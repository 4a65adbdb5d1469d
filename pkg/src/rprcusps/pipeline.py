"""Cusp detection on a joint-space slice (fixed L1).

The singularity condition F1 and the cusp condition E1 are written as
polynomials in ``t = tan(alpha/2)`` and ``t1 = tan(theta1/2)``.  Eliminating
``t`` gives a univariate resultant in ``t1``; every real root is
back-substituted into F1, the resulting pairs are filtered by E1, polished
by Newton's method on (F1, E1), mapped to leg lengths and finally accepted
only when the direct kinematics at those leg lengths has three coincident
solutions.  The last check is essential: E1 = 0 is necessary at a cusp but
not sufficient, and the resultant also carries spurious factors.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import DegenerateLeg, DegenerateResultant, IdenticallyZeroSlice, PrecisionExhausted, RprError
from .geometry import SlicePose, exact_number, leg_lengths, pose_to_joints, wrap_angle
from .halfangle import cusp_expr, singularity_expr, slice_map_cusp_expr
from .kinematics import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_MODE_TOL,
    cluster_spread,
    coincidence_multiplicity,
    direct_kinematics,
    singularity_residual,
)
from .polysolve import BiPoly, DEFAULT_DIGITS, UniPoly, real_roots, sylvester_resultant_in_t, to_mpf, working_precision

DEFAULT_MERGE_RADIUS = 1e-6


@dataclass(frozen=True)
class SliceProblem:
    """One slice of the joint space: geometry plus the fixed first leg length."""

    geom: object
    l1: object
    digits: int = DEFAULT_DIGITS
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    mode_tol: float = DEFAULT_MODE_TOL
    merge_radius: float = DEFAULT_MERGE_RADIUS
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "l1", exact_number(self.l1, "l1"))
        if self.l1 <= 0:
            raise ValueError("l1 must be positive")
        if self.digits < 30:
            raise ValueError("at least 30 digits are required")
        for name in ("cluster_tol", "mode_tol", "merge_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def filter_tol(self):
        return mp.mpf(10) ** (-(self.digits // 3))

    @property
    def verify_tol(self):
        return mp.mpf(10) ** (-(self.digits // 2))


@dataclass(frozen=True)
class CuspPoint:
    alpha: object
    theta1: object
    l2: object
    l3: object
    res_f1: object
    res_e1: object
    res_sing: object
    dkp_multiplicity: int
    dkp_spread: object = None
    root_multiplicity: int = 1

    @property
    def alpha_deg(self):
        return mp.degrees(self.alpha)

    @property
    def theta1_deg(self):
        return mp.degrees(self.theta1)


@dataclass(frozen=True)
class Candidate:
    """A pair that passed the E1 filter, with the reason it was rejected (if any)."""

    alpha: object
    theta1: object
    l2: object
    l3: object
    res_f1: object
    res_e1: object
    dkp_multiplicity: int
    status: str
    root_multiplicity: int = 1


@dataclass
class SliceResult:
    problem: SliceProblem
    cusps: list
    candidates: list
    resultant_degree: int
    resultant_real_roots: int
    f1_degrees: tuple
    e1_degrees: tuple
    cusp_condition: str = "hessian"
    singular_lines: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


# ------------------------------------------------------------------ polynomials


def _strip_circles(expr):
    num, ka = expr.num.divide_circle_t()
    num, k1 = num.divide_circle_t1()
    return num.trim(), expr.pa - ka, expr.p1 - k1


def build_F1(problem):
    """Singularity condition as a polynomial in (t, t1).

    Returns ``(poly, pa, p1)``: ``poly`` equals L2·L3·(1+t^2)^pa·(1+t1^2)^p1
    times the leg-concurrency residual.
    """
    with working_precision(problem.digits):
        return _strip_circles(singularity_expr(problem.geom, problem.l1))


def build_E1(problem):
    """Cusp condition as a polynomial in (t, t1).

    Returns ``(poly, pa, p1)``: ``poly`` equals (1+t^2)^pa·(1+t1^2)^p1 times
    :func:`~rprcusps.kinematics.cusp_form` at the same pose.
    """
    with working_precision(problem.digits):
        return _strip_circles(cusp_expr(problem.geom, problem.l1))


def build_slice_map_condition(problem):
    """Cusp condition of the slice map (alpha, theta1) -> (L2^2, L3^2) as a polynomial in (t, t1).

    Used when the Hessian form degenerates (a flat platform makes it vanish
    on the whole singular curve).  Returns ``(poly, pa, p1)`` like
    :func:`build_E1`.
    """
    with working_precision(problem.digits):
        _, cond = slice_map_cusp_expr(problem.geom, problem.l1)
        return _strip_circles(cond)


def eliminate_alpha(F1, E1, sample_offset=0, jobs=1):
    """Resultant of F1 and E1 with respect to ``t``."""
    return sylvester_resultant_in_t(F1, E1, sample_offset=sample_offset, jobs=jobs)


def _line_factors(poly, nominal_t, nominal_t1):
    """Remove factors t, t1 and the degree deficits that mean t or t1 = infinity.

    A vanishing lowest row means the whole line alpha = 0 is a solution; a
    t-degree below the nominal one means alpha = pi is.  Returns the reduced
    polynomial and a list of ``(variable, angle, multiplicity)`` lines.
    """
    lines = []
    thr = poly.norm() * mp.mpf(10) ** (-(mp.dps - 10))
    rows = [list(r) for r in poly.rows]
    k = 0
    while len(rows) > 1 and all(abs(c) <= thr for c in rows[0]):
        rows.pop(0)
        k += 1
    if k:
        lines.append(("alpha", mp.zero, k))
    deficit = nominal_t - (len(rows) - 1 + k)
    if deficit > 0:
        lines.append(("alpha", +mp.pi, deficit))
    k = 0
    while rows and len(rows[0]) > 1 and all(abs(r[0]) <= thr for r in rows):
        for r in rows:
            r.pop(0)
        k += 1
    if k:
        lines.append(("theta1", mp.zero, k))
    deficit = nominal_t1 - (len(rows[0]) - 1 + k)
    if deficit > 0:
        lines.append(("theta1", +mp.pi, deficit))
    return BiPoly(rows, poly.prec), lines


# ------------------------------------------------------------------ charts


def _rev_t(poly, n):
    """``t^n · poly(1/t, t1)`` for a nominal t-degree ``n >= deg_t``."""
    width = poly.deg_t1 + 1
    rows = [list(r) for r in poly.rows] + [[0] * width for _ in range(n - poly.deg_t)]
    return BiPoly(rows[::-1], poly.prec)


def _rev_t1(poly, n):
    return _rev_t(poly.transpose(), n).transpose()


class _Charted:
    """A BiPoly with its three reversed charts, so alpha or theta1 = pi is an ordinary point.

    ``n_t`` and ``n_t1`` are the nominal degrees, i.e. the exponents of the
    cleared half-angle denominators; a smaller actual degree means the
    polynomial vanishes at infinity in that variable.
    """

    def __init__(self, poly, n_t=None, n_t1=None):
        n_t = poly.deg_t if n_t is None else max(n_t, poly.deg_t)
        n_t1 = poly.deg_t1 if n_t1 is None else max(n_t1, poly.deg_t1)
        self.polys = {}
        self.polys[(False, False)] = poly
        self.polys[(True, False)] = _rev_t(poly, n_t)
        self.polys[(False, True)] = _rev_t1(poly, n_t1)
        self.polys[(True, True)] = _rev_t1(self.polys[(True, False)], n_t1)
        self._d = {}

    def deriv(self, chart):
        if chart not in self._d:
            p = self.polys[chart]
            self._d[chart] = (p.diff_t(), p.diff_t1())
        return self._d[chart]


def _chart_coord(angle):
    """(reversed?, coordinate) of an angle in the half-angle chart that keeps it bounded."""
    half = angle / 2
    c, s = mp.cos(half), mp.sin(half)
    if abs(c) >= abs(s):
        return False, s / c
    return True, c / s


def _angle_from(rev, x):
    if rev:
        return wrap_angle(2 * mp.atan2(1, x))
    return 2 * mp.atan(x)


def _rel_res(charted, alpha, theta1):
    ra, x = _chart_coord(alpha)
    rb, y = _chart_coord(theta1)
    return charted.polys[(ra, rb)].relative_residual(x, y)


def _newton(fc, gc, alpha, theta1, steps=60):
    """Polish a common zero of two charted polynomials; never makes residuals worse."""
    ra, x = _chart_coord(alpha)
    rb, y = _chart_coord(theta1)
    chart = (ra, rb)
    f, g = fc.polys[chart], gc.polys[chart]
    fx, fy = fc.deriv(chart)
    gx, gy = gc.deriv(chart)

    def score(x, y):
        return max(f.relative_residual(x, y), g.relative_residual(x, y))

    best = score(x, y)
    tiny = mp.mpf(2) ** (-(mp.prec - 20))
    for _ in range(steps):
        if not best:
            break
        a, b, c, d = fx(x, y), fy(x, y), gx(x, y), gy(x, y)
        det = a * d - b * c
        if not det:
            break
        fv, gv = f(x, y), g(x, y)
        dx = (fv * d - gv * b) / det
        dy = (a * gv - c * fv) / det
        nx, ny = x - dx, y - dy
        s = score(nx, ny)
        if not s < best:
            break
        x, y, best = nx, ny, s
        if abs(dx) <= tiny * (1 + abs(x)) and abs(dy) <= tiny * (1 + abs(y)):
            break
    return _angle_from(ra, x), _angle_from(rb, y)


# ------------------------------------------------------------------ candidates


def _roots_of(uni, stage, **kw):
    try:
        if uni.trim().degree <= 0:
            return []
        return real_roots(uni.trim(), **kw)
    except PrecisionExhausted as exc:
        raise PrecisionExhausted(str(exc), stage=stage) from exc


def _specialise(charted, var, angle):
    """Univariate restriction with the other angle fixed, plus the chart flag of the free variable.

    Returns two restrictions: in the ordinary chart and in the reversed one,
    so the free angle's value pi is available as the root 0 of the latter.
    """
    rev, c = _chart_coord(angle)
    if var == "theta1":
        direct = charted.polys[(False, rev)].in_t1(c)
        flipped = charted.polys[(True, rev)].in_t1(c)
    else:
        direct = charted.polys[(rev, False)].in_t(c)
        flipped = charted.polys[(rev, True)].in_t(c)
    return direct, flipped


def _angles_on(charted, var, angle, stage, tol):
    """All real values of the free angle where the charted polynomial vanishes."""
    direct, flipped = _specialise(charted, var, angle)
    scale = max(direct.norm(), flipped.norm())
    if not scale or direct.norm() <= scale * tol and flipped.norm() <= scale * tol:
        raise IdenticallyZeroSlice(f"polynomial vanishes along {var} = {mpmath.nstr(mp.degrees(angle), 12)} deg")
    out = [(2 * mp.atan(r.estimate), r.multiplicity_hint) for r in _roots_of(direct, stage)]
    # free angle = pi: lowest coefficient of the reversed restriction
    if flipped.coeffs and abs(flipped.coeffs[0]) <= flipped.norm() * tol:
        out.append((+mp.pi, 1))
    return out


def _residual_sing(geom, pose):
    """Normalised leg-concurrency residual, or None when a leg length vanishes."""
    try:
        j = pose_to_joints(geom, pose)
    except DegenerateLeg:
        return None
    scale = abs(geom.value("a2x")) + abs(geom.value("a3x")) + abs(geom.value("a3y"))
    return abs(singularity_residual(geom, (to_mpf(pose.theta1), j.theta2, j.theta3))) / scale


def _close(p, q, radius):
    return abs(wrap_angle(p[0] - q[0])) / 2 < radius and abs(wrap_angle(p[1] - q[1])) / 2 < radius


def _collect_candidates(problem, g, e1, e_nominal, lines, warnings):
    """(alpha, theta1, resultant-root multiplicity) pairs before the E1 filter."""
    fc = _Charted(g)
    ec = _Charted(e1, *e_nominal)
    tol = problem.filter_tol
    raw = []
    res = eliminate_alpha(g, e1, jobs=problem.jobs)
    roots = _roots_of(res, "resultant roots")
    theta1s = [(2 * mp.atan(r.estimate), r.multiplicity_hint) for r in roots]
    # theta1 = pi sits at t1 = infinity and never shows up as a finite root
    theta1s.append((+mp.pi, 1))
    for th1, mult in theta1s:
        try:
            alphas = _angles_on(fc, "theta1", th1, "back-substitution", tol)
        except IdenticallyZeroSlice as exc:
            warnings.append(str(exc))
            continue
        for a, _ in alphas:
            raw.append((a, th1, mult))
    for var, angle, _ in lines:
        try:
            others = _angles_on(ec, var, angle, "singular line", tol)
        except IdenticallyZeroSlice as exc:
            warnings.append(f"cusp condition {exc}; that line is not searched")
            continue
        for other, mult in others:
            raw.append((angle, other, mult) if var == "alpha" else (other, angle, mult))
    return res, len(roots), fc, ec, raw


def _on_lines(lines, alpha, theta1, radius):
    for var, angle, _ in lines:
        x = alpha if var == "alpha" else theta1
        if abs(wrap_angle(x - angle)) < radius:
            return True
    return False


def _verify(problem, fc_full, ec, lines, a, th1, mult):
    geom = problem.geom
    l1 = to_mpf(problem.l1)
    pose = SlicePose(l1, a, th1)
    l2, l3 = leg_lengths(geom, pose)
    on_line = _on_lines(lines, a, th1, problem.merge_radius)
    # F1 contains the line as an exact factor; its relative residual is 0/0 there
    rf = mp.zero if on_line else _rel_res(fc_full, a, th1)
    re = _rel_res(ec, a, th1)
    rs = _residual_sing(geom, pose)
    if rs is None:
        rs = rf
    mult_dkp, spread = 0, None
    if on_line:
        # every pose of such a line is already a double DKP solution
        status = "singular_line"
    elif max(rf, re, rs) >= problem.verify_tol:
        status = "residual"
    else:
        modes = direct_kinematics(geom, (l1, l2, l3), problem.cluster_tol, problem.mode_tol)
        mult_dkp = coincidence_multiplicity(modes, problem.cluster_tol)
        spread = cluster_spread(modes, problem.cluster_tol)
        status = "verified" if mult_dkp >= 3 else "dkp"
    cand = Candidate(a, th1, l2, l3, rf, re, mult_dkp, status, mult)
    cusp = CuspPoint(a, th1, l2, l3, rf, re, rs, mult_dkp, spread, mult) if status == "verified" else None
    return cand, cusp


def analyze_slice(problem):
    """Run the whole slice pipeline and keep the intermediate sets."""
    with working_precision(problem.digits):
        f1, pa_f, p1_f = build_F1(problem)
        e1, pa_e, p1_e = build_E1(problem)
        g, lines = _line_factors(f1, 2 * pa_f, 2 * p1_f)
        warnings = []
        fc_full = _Charted(f1, 2 * pa_f, 2 * p1_f)
        condition = "hessian"
        try:
            res, n_roots, fc, ec, raw = _collect_candidates(problem, g, e1, (2 * pa_e, 2 * p1_e), lines, warnings)
        except DegenerateResultant:
            warnings.append("Hessian cusp form shares a factor with F1; using the slice-map cusp condition")
            condition = "slice_map"
            e1, pa_e, p1_e = build_slice_map_condition(problem)
            res, n_roots, fc, ec, raw = _collect_candidates(problem, g, e1, (2 * pa_e, 2 * p1_e), lines, warnings)
        survivors = []
        for a, th1, mult in raw:
            if _rel_res(ec, a, th1) >= problem.filter_tol:
                continue
            if not _on_lines(lines, a, th1, problem.merge_radius):
                a, th1 = _newton(fc, ec, a, th1)
            a, th1 = wrap_angle(a), wrap_angle(th1)
            if any(_close((a, th1), (s[0], s[1]), problem.merge_radius) for s in survivors):
                continue
            survivors.append((a, th1, mult))
        cusps, candidates = [], []
        for a, th1, mult in survivors:
            cand, cusp = _verify(problem, fc_full, ec, lines, a, th1, mult)
            candidates.append(cand)
            if cusp is not None:
                cusps.append(cusp)
        cusps.sort(key=lambda c: (c.theta1, c.alpha))
        candidates.sort(key=lambda c: (c.theta1, c.alpha))
        return SliceResult(
            problem=problem,
            cusps=cusps,
            candidates=candidates,
            resultant_degree=res.degree,
            resultant_real_roots=n_roots,
            f1_degrees=(f1.deg_t, f1.deg_t1),
            e1_degrees=(e1.deg_t, e1.deg_t1),
            cusp_condition=condition,
            singular_lines=[(var, float(mp.degrees(angle)), k) for var, angle, k in lines],
            warnings=warnings,
        )


def find_cusps(problem):
    """Verified cusp points of a slice, sorted by theta1."""
    return analyze_slice(problem).cusps


# ------------------------------------------------------------------ diagnostics


def conjecture_report(result):
    """Check whether every verified cusp comes from a simple resultant root.

    Factors with exponent above one are what an approximate square-free
    reduction removes, so a cusp on a repeated root would not survive it.
    """
    simple = [c.root_multiplicity == 1 for c in result.cusps]
    return {
        "cusps": len(simple),
        "on_simple_roots": sum(simple),
        "all_survive_square_free": all(simple),
    }


# ------------------------------------------------------------------ scanning


@dataclass(frozen=True)
class ScanSample:
    l1: Fraction
    cusps: tuple
    error: str = None

    @property
    def count(self):
        return None if self.error else len(self.cusps)


@dataclass(frozen=True)
class ScanReport:
    samples: tuple

    @property
    def transitions(self):
        """Consecutive samples whose cusp counts differ."""
        out = []
        for a, b in zip(self.samples, self.samples[1:]):
            if a.count is not None and b.count is not None and a.count != b.count:
                out.append((a.l1, a.count, b.l1, b.count))
        return out


def scan_values(l1_min, l1_max, step):
    """Sample points ``l1_min + i·step`` up to ``l1_max`` in exact arithmetic."""
    lo, hi, st = (exact_number(x, n) for x, n in ((l1_min, "l1_min"), (l1_max, "l1_max"), (step, "step")))
    if not (0 < lo <= hi) or st <= 0:
        raise ValueError("need 0 < l1_min <= l1_max and step > 0")
    out, i = [], 0
    while lo + i * st <= hi:
        out.append(lo + i * st)
        i += 1
    return out


def _scan_one(problem):
    try:
        return ScanSample(problem.l1, tuple(find_cusps(problem)))
    except RprError as exc:
        return ScanSample(problem.l1, (), error=f"{type(exc).__name__}: {exc}")


def scan_l1(geom, values, jobs=1, **opts):
    """Cusp counts over a list of L1 values; slices may run in worker processes."""
    problems = [SliceProblem(geom, v, **opts) for v in values]
    if jobs and jobs > 1 and len(problems) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(_scan_one, problems))
    else:
        samples = [_scan_one(p) for p in problems]
    return ScanReport(tuple(samples))


__all__ = [
    "Candidate",
    "CuspPoint",
    "ScanReport",
    "ScanSample",
    "SliceProblem",
    "SliceResult",
    "analyze_slice",
    "build_E1",
    "build_F1",
    "build_slice_map_condition",
    "conjecture_report",
    "eliminate_alpha",
    "find_cusps",
    "scan_l1",
    "scan_values",
]

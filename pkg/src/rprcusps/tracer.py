"""Sampling of the singular curves of a slice and their SVG rendering.

The orientation alpha is sampled uniformly; at each sample the singularity
polynomial is solved for every real theta1.  Neighbouring samples whose
root count differs, or whose roots jump, are bisected further.  Points are
stitched into branches by nearest-neighbour continuation in (alpha, theta1)
and mapped to (L2, L3) for plotting.
"""

import math
from dataclasses import dataclass, field

from mpmath import mp

from .errors import IdenticallyZeroSlice
from .geometry import DEFAULT_LEG_EPS, SlicePose, leg_lengths, wrap_angle
from .pipeline import SliceProblem, _Charted, _angles_on, _line_factors, build_F1
from .polysolve import to_mpf, working_precision

TRACE_DIGITS = 30
MAX_DEPTH = 8
GAP_FACTOR = 3


@dataclass(frozen=True)
class TracePoint:
    alpha: float
    theta1: float
    l2: float
    l3: float


@dataclass
class SingularCurveSlice:
    l1: float
    branches: list
    degenerate_points: int = 0
    singular_lines: list = field(default_factory=list)

    @property
    def point_count(self):
        return sum(len(b) for b in self.branches)


def _column(fc, alpha):
    """theta1 roots of the singularity polynomial at a fixed alpha, ascending."""
    try:
        roots = _angles_on(fc, "alpha", mp.mpf(alpha), "trace", mp.mpf(10) ** (-(mp.dps // 2)))
    except IdenticallyZeroSlice:
        return []
    out = []
    for th in sorted(float(wrap_angle(th)) for th, _ in roots):
        # theta1 = pi can be reported from both sides of the seam
        if not any(abs(_wrap(th - u)) < 1e-9 for u in out):
            out.append(th)
    return out


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def _needs_split(a, b, jump):
    if len(a) != len(b):
        return True
    return any(abs(_wrap(x - y)) > jump for x, y in zip(a, b))


def _sample(fc, n):
    """Adaptive alpha samples: list of (alpha, [theta1...]) sorted by alpha."""
    step = 2 * math.pi / n
    base = [(k + 0.5) * step - math.pi for k in range(n)]
    cols = {a: _column(fc, a) for a in base}
    jump = GAP_FACTOR * step

    def refine(a, b, depth):
        if depth >= MAX_DEPTH or not _needs_split(cols[a], cols[b], jump):
            return
        m = (a + b) / 2
        cols[m] = _column(fc, _wrap(m))
        refine(a, m, depth + 1)
        refine(m, b, depth + 1)

    # the last interval crosses the alpha = ±pi seam; keys stay unwrapped
    ends = base + [base[0] + 2 * math.pi]
    cols[ends[-1]] = cols[base[0]]
    for a, b in zip(ends, ends[1:]):
        refine(a, b, 0)
    del cols[ends[-1]]
    return sorted(cols.items()), step


def _stitch(samples, gap):
    """Greedy nearest-neighbour continuation; returns lists of (alpha, theta1)."""
    open_branches, closed = [], []
    for alpha, roots in samples:
        taken = set()
        still_open = []
        pairs = []
        for bi, br in enumerate(open_branches):
            a0, t0 = br[-1]
            if alpha - a0 > gap:
                continue
            for ri, th in enumerate(roots):
                d = abs(_wrap(th - t0))
                if d <= gap:
                    pairs.append((d, bi, ri))
        pairs.sort()
        used_b = set()
        for d, bi, ri in pairs:
            if bi in used_b or ri in taken:
                continue
            used_b.add(bi)
            taken.add(ri)
            open_branches[bi].append((alpha, roots[ri]))
        for bi, br in enumerate(open_branches):
            (still_open if bi in used_b else closed).append(br)
        for ri, th in enumerate(roots):
            if ri not in taken:
                still_open.append([(alpha, th)])
        open_branches = still_open
    return closed + open_branches


def _join_ends(branches, gap):
    """Join branches whose end points meet (turning points and the alpha = ±pi seam)."""

    def dist(p, q):
        return max(abs(_wrap(p[0] - q[0])), abs(_wrap(p[1] - q[1])))

    branches = [list(b) for b in branches]
    changed = True
    while changed:
        changed = False
        best = None
        for i in range(len(branches)):
            for j in range(i, len(branches)):
                for ei in (0, -1):
                    for ej in (0, -1):
                        if i == j and (ei == ej or len(branches[i]) < 3):
                            continue
                        if i == j:
                            continue
                        d = dist(branches[i][ei], branches[j][ej])
                        if d <= gap and (best is None or d < best[0]):
                            best = (d, i, ei, j, ej)
        if best:
            _, i, ei, j, ej = best
            a, b = branches[i], branches[j]
            if ei == 0:
                a = a[::-1]
            if ej == -1:
                b = b[::-1]
            branches[i] = a + b
            del branches[j]
            changed = True
    return branches


def trace_slice(geom, l1, n_alpha_samples=360, digits=TRACE_DIGITS, leg_eps=DEFAULT_LEG_EPS):
    """Singular curves of the slice ``L1 = l1`` as branches of points."""
    if n_alpha_samples < 16:
        raise ValueError("n_alpha_samples must be at least 16")
    problem = SliceProblem(geom, l1, digits=max(digits, 30))
    with working_precision(problem.digits):
        f1, pa, p1 = build_F1(problem)
        g, lines = _line_factors(f1, 2 * pa, 2 * p1)
        fc = _Charted(g)
        samples, step = _sample(fc, n_alpha_samples)
        gap = GAP_FACTOR * step
        raw = _stitch(samples, gap)
        # whole singular lines alpha = const are traced along theta1
        for var, angle, _ in lines:
            pts = [((k + 0.5) * step - math.pi) for k in range(n_alpha_samples)]
            if var == "alpha":
                raw.append([(float(angle), th) for th in pts])
            else:
                raw.append([(a, float(angle)) for a in pts])
        raw = _join_ends(raw, gap)
        l1m = to_mpf(problem.l1)
        branches, degenerate = [], 0
        for br in raw:
            out = []
            for a, th in br:
                l2, l3 = leg_lengths(geom, SlicePose(l1m, mp.mpf(a), mp.mpf(th)))
                if l2 < leg_eps or l3 < leg_eps:
                    degenerate += 1
                    continue
                out.append(TracePoint(_wrap(a), th, float(l2), float(l3)))
            if out:
                branches.append(out)
    branches.sort(key=lambda b: (b[0].alpha, b[0].theta1))
    return SingularCurveSlice(
        l1=float(problem.l1),
        branches=branches,
        degenerate_points=degenerate,
        singular_lines=[(v, float(mp.degrees(a)), k) for v, a, k in lines],
    )


def curve_rows(curves):
    """CSV rows (alpha_deg, theta1_deg, L2, L3, branch_id) in branch order."""
    rows = []
    for bid, br in enumerate(curves.branches):
        for p in br:
            rows.append((math.degrees(p.alpha), math.degrees(p.theta1), p.l2, p.l3, bid))
    return rows


# ------------------------------------------------------------------ SVG


def _ticks(lo, hi, count=5):
    span = hi - lo
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if raw <= m * mag:
            step = m * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-9 * step:
        out.append(round(x, 10))
        x += step
    return out


def _label(i):
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(65 + r) + s
    return s


def emit_plot(curves, cusps, width=640, height=640, labels=None):
    """Standalone SVG: branches as polylines in (L2, L3), cusps as circled letters."""
    margin = 60
    pts = [(p.l2, p.l3) for br in curves.branches for p in br]
    pts += [(float(c.l2), float(c.l3)) for c in cusps]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    x0, y0 = min(x0, 0.0), min(y0, 0.0)
    if x1 - x0 < 1e-9:
        x1 = x0 + 1.0
    if y1 - y0 < 1e-9:
        y1 = y0 + 1.0
    pad_x, pad_y = 0.03 * (x1 - x0), 0.03 * (y1 - y0)
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y
    pw, ph = width - 2 * margin, height - 2 * margin

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{height - margin}" x2="{x:.2f}" y2="{height - margin + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{height - margin + 18}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        y = sy(v)
        out.append(f'<line x1="{margin - 5}" y1="{y:.2f}" x2="{margin}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{margin - 8}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 15}" text-anchor="middle">L2</text>')
    out.append(f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" transform="rotate(-90 18 {height / 2:.1f})">L3</text>')
    out.append(f'<text x="{width / 2:.1f}" y="30" text-anchor="middle" font-size="14">L1 = {curves.l1:g}</text>')
    out.append(f'<clipPath id="plot"><rect x="{margin}" y="{margin}" width="{pw}" height="{ph}"/></clipPath>')
    out.append('<g clip-path="url(#plot)" fill="none" stroke="#1f4e9c" stroke-width="1.2">')
    for br in curves.branches:
        if len(br) == 1:
            p = br[0]
            out.append(f'<circle cx="{sx(p.l2):.2f}" cy="{sy(p.l3):.2f}" r="0.8" fill="#1f4e9c"/>')
            continue
        coords = " ".join(f"{sx(p.l2):.2f},{sy(p.l3):.2f}" for p in br)
        out.append(f'<polyline points="{coords}"/>')
    out.append("</g>")
    out.append('<g fill="none" stroke="#c0392b" stroke-width="1.5">')
    names = labels or [_label(i) for i in range(len(cusps))]
    for name, c in zip(names, cusps):
        x, y = sx(float(c.l2)), sy(float(c.l3))
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="7"/>')
        out.append(f'<text x="{x + 9:.2f}" y="{y - 9:.2f}" fill="#c0392b" stroke="none">{name}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = ["SingularCurveSlice", "TracePoint", "curve_rows", "emit_plot", "trace_slice"]

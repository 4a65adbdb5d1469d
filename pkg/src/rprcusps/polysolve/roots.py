"""Real-root isolation (Descartes rule on Bernstein coefficients) and refinement.

Isolation runs on an integer image of the Bernstein coefficients, so the
subdivision itself is exact for the rounded polynomial.  Intervals whose
sign-variation count stays at ``v >= 2`` down to ``cluster_width`` are
reported as one root cluster with ``multiplicity_hint = v``; the estimate
is then refined on the ``(v-1)``-th derivative, which has a simple root
inside a ``v``-fold cluster.
"""

from dataclasses import dataclass

import mpmath
from mpmath import mp

from ..errors import IdenticallyZeroSlice, PolynomialError, PrecisionExhausted
from .poly import BiPoly, UniPoly
from .precision import rel_threshold, to_mpf


@dataclass(frozen=True)
class RealRoot:
    estimate: object
    radius: object
    multiplicity_hint: int = 1

    @property
    def interval(self):
        return (self.estimate - self.radius, self.estimate + self.radius)


def _sign_variations(coeffs):
    count, last = 0, 0
    for c in coeffs:
        if c:
            s = 1 if c > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


def _bernstein_ints(p, a, b, extra_bits=32):
    """Integer-scaled Bernstein coefficients of ``p`` on ``[a, b]``."""
    r = p.compose_affine(a, b - a)
    n = len(p.coeffs) - 1
    cs = list(r.coeffs) + [mp.zero] * (n + 1 - len(r.coeffs))
    binom = [mpmath.binomial(n, j) for j in range(n + 1)]
    bern = []
    for k in range(n + 1):
        acc = mp.zero
        ck = mp.one
        for j in range(k + 1):
            acc += ck / binom[j] * cs[j]
            ck = ck * (k - j) / (j + 1)
        bern.append(acc)
    big = max(abs(c) for c in bern)
    if not big:
        raise PrecisionExhausted("polynomial vanishes at working precision", stage="real_roots")
    shift = mp.prec + extra_bits - int(mpmath.floor(mpmath.log(big, 2)))
    return [int(mpmath.nint(mpmath.ldexp(c, shift))) for c in bern]


def _split(coeffs, budget):
    """de Casteljau at the midpoint, kept in integers (both halves scaled by 2^n)."""
    n = len(coeffs) - 1
    left, right = [coeffs[0] << n], [coeffs[-1] << n]
    row = coeffs
    for k in range(1, n + 1):
        row = [x + y for x, y in zip(row, row[1:])]
        left.append(row[0] << (n - k))
        right.append(row[-1] << (n - k))
    right.reverse()
    excess = max(max(abs(x) for x in left).bit_length(), max(abs(x) for x in right).bit_length()) - budget
    if excess > 0:
        left = [x >> excess for x in left]
        right = [x >> excess for x in right]
    return left, right


def _noise(p, x):
    return p.abs_eval(x) * len(p.coeffs) * mp.mpf(2) ** (-(mp.prec - 8))


def _reliable_sign(p, x):
    v = p(x)
    if abs(v) <= _noise(p, x):
        return 0
    return 1 if v > 0 else -1


def _refine_simple(p, lo, hi, s_lo, s_hi, radius):
    """Bisection-safeguarded Newton inside a sign-changing bracket."""
    dp = p.derivative()
    x = (lo + hi) / 2
    for _ in range(4 * mp.prec):
        if hi - lo <= 2 * radius:
            break
        fx = p(x)
        if abs(fx) <= _noise(p, x):
            return _tighten(p, x, lo, hi, s_lo, radius)
        s = 1 if fx > 0 else -1
        if s == s_lo:
            lo = x
        else:
            hi = x
        d = dp(x)
        nx = x - fx / d if d else None
        if nx is None or not (lo < nx < hi):
            nx = (lo + hi) / 2
        x = nx
    mid = (lo + hi) / 2
    return mid, (hi - lo) / 2


def _tighten(p, x, lo, hi, s_lo, radius):
    """Shrink a bracket around a point where |p| fell to rounding noise."""
    delta = max(radius, abs(x) * mp.mpf(2) ** (-(mp.prec - 24)), mp.mpf(2) ** (-(mp.prec - 24)))
    while delta < (hi - lo):
        # bracket ends already carry known signs
        a, b = max(x - delta, lo), min(x + delta, hi)
        sa = s_lo if a == lo else _reliable_sign(p, a)
        sb = -s_lo if b == hi else _reliable_sign(p, b)
        if sa == s_lo and sb == -s_lo:
            return x, max(x - a, b - x)
        delta *= 4
    return x, max(x - lo, hi - x)


def _refine_cluster(p, m, lo, hi):
    q = p.derivative(m - 1)
    x = (lo + hi) / 2
    sl, sh = _reliable_sign(q, lo), _reliable_sign(q, hi)
    if sl and sh and sl != sh:
        x, _ = _refine_simple(q, lo, hi, sl, sh, (hi - lo) * mp.mpf(2) ** (-mp.prec // 2))
    else:
        dq = q.derivative()
        for _ in range(60):
            d = dq(x)
            if not d:
                break
            nx = x - q(x) / d
            if not (lo <= nx <= hi):
                break
            if abs(nx - x) <= abs(x) * mp.eps * 4:
                x = nx
                break
            x = nx
    return x, max(x - lo, hi - x)


def _isolate(p, a, b, cluster_width, radius):
    """Roots of ``p`` in the closed interval ``[a, b]``."""
    n = len(p.coeffs) - 1
    if n <= 0:
        return []
    top = _bernstein_ints(p, a, b)
    budget = mp.prec + 64 + 2 * n
    width0 = b - a
    floor_level = mp.prec - 8
    found = []
    endpoint_roots = []
    if top[0] == 0:
        endpoint_roots.append(a)
    if top[-1] == 0:
        endpoint_roots.append(b)
    stack = [(0, 0, top)]
    while stack:
        level, num, cs = stack.pop()
        v = _sign_variations(cs)
        if v == 0:
            continue
        lo = a + width0 * num / mp.mpf(2) ** level
        hi = a + width0 * (num + 1) / mp.mpf(2) ** level
        if v == 1:
            s_lo = 1 if _first_nonzero(cs) > 0 else -1
            s_hi = 1 if _first_nonzero(cs[::-1]) > 0 else -1
            est, rad = _refine_simple(p, lo, hi, s_lo, s_hi, radius(lo, hi))
            found.append(RealRoot(est, rad, 1))
            continue
        if hi - lo <= cluster_width:
            est, rad = _refine_cluster(p, v, lo, hi)
            found.append(RealRoot(est, rad, v))
            continue
        if level >= floor_level:
            raise PrecisionExhausted(
                f"cannot separate a {v}-fold root cluster near {mpmath.nstr(lo, 15)}",
                stage="real_roots",
            )
        left, right = _split(cs, budget)
        if left[-1] == 0:
            endpoint_roots.append((lo + hi) / 2)
        stack.append((level + 1, 2 * num + 1, right))
        stack.append((level + 1, 2 * num, left))
    for x in endpoint_roots:
        found.append(RealRoot(x, mp.zero, _zero_order(p, x)))
    return found


def _first_nonzero(cs):
    for c in cs:
        if c:
            return c
    return 0


def _zero_order(p, x):
    k, q = 1, p.derivative()
    while len(q.coeffs) > 1 and abs(q(x)) <= _noise(q, x):
        k, q = k + 1, q.derivative()
    return k


def _dedupe(roots):
    roots = sorted(roots, key=lambda r: r.estimate)
    out = []
    for r in roots:
        if out:
            prev = out[-1]
            gap = abs(r.estimate - prev.estimate)
            if gap <= prev.radius + r.radius or gap <= abs(r.estimate) * mp.eps * 16:
                if r.multiplicity_hint > prev.multiplicity_hint or r.radius < prev.radius:
                    out[-1] = r
                continue
        out.append(r)
    return out


def real_roots(p, domain=None, radius=None, cluster_width=None):
    """All real roots of ``p`` (optionally restricted to ``domain = (a, b)``).

    ``radius`` is the requested half-width for simple roots (default about
    ``2^-(0.8·prec)`` relative); ``cluster_width`` is the interval width at
    which subdivision stops and a multi-root cluster is declared (default
    ``2^-(prec/5)``).  Roots of magnitude above 1 are isolated on the
    reversed polynomial so the whole real line is covered.
    """
    if not isinstance(p, UniPoly):
        raise TypeError("real_roots expects a UniPoly")
    with mpmath.workprec(p.prec):
        p = p.trim()
        if p.is_zero():
            raise PolynomialError("the zero polynomial has no isolated roots")
        cw = mp.mpf(2) ** (-(mp.prec // 5)) if cluster_width is None else to_mpf(cluster_width)
        rel = mp.mpf(2) ** (-int(mp.prec * 0.8)) if radius is None else None

        def rad_for(lo, hi):
            if radius is not None:
                return to_mpf(radius)
            return rel * max(mp.one, abs(lo), abs(hi))

        roots = []
        cs = list(p.coeffs)
        k = 0
        while cs and not cs[0]:
            cs.pop(0)
            k += 1
        if k:
            roots.append(RealRoot(mp.zero, mp.zero, k))
        q = UniPoly(cs, p.prec)
        if domain is not None:
            a, b = (to_mpf(x) for x in domain)
            if not a < b:
                raise ValueError("domain must satisfy a < b")
            if k and not (a <= 0 <= b):
                roots = []
            roots.extend(_isolate(q, a, b, cw, rad_for))
            return _dedupe(roots)
        roots.extend(_isolate(q, -mp.one, mp.one, cw, rad_for))
        rev = q.reversed()
        for r in _isolate(rev, -mp.one, mp.one, cw, rad_for):
            y = r.estimate
            if not y:
                continue
            x = 1 / y
            if abs(x) <= 1:
                continue
            rad = r.radius / (abs(y) * max(abs(y) - r.radius, abs(y) / 2)) if r.radius else mp.zero
            roots.append(RealRoot(x, rad, r.multiplicity_hint))
        return _dedupe(roots)


def solve_for_second_var(f, t1_value, **kwargs):
    """Real roots in ``t`` of ``f(t, t1_value)``."""
    if not isinstance(f, BiPoly):
        raise TypeError("solve_for_second_var expects a BiPoly")
    with mpmath.workprec(f.prec):
        v = to_mpf(t1_value)
        u = f.in_t1(v)
        scale = f.map_abs().in_t1(abs(v)).norm()
        if u.is_zero() or u.norm() <= scale * rel_threshold():
            raise IdenticallyZeroSlice(f"f(., {mpmath.nstr(t1_value, 12)}) vanishes identically")
        return real_roots(u, **kwargs)

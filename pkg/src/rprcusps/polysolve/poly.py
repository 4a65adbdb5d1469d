"""Dense univariate and bivariate polynomials over multiprecision reals."""

import mpmath
from mpmath import mp

from ..errors import PrecisionMismatch
from .precision import rel_threshold, to_mpf


def _check_prec(a, b):
    if a.prec != b.prec:
        raise PrecisionMismatch(f"polynomials built at {a.prec} and {b.prec} bits")


def _is_scalar(x):
    return not isinstance(x, (UniPoly, BiPoly))


class UniPoly:
    """Polynomial with real coefficients in ascending degree order.

    Exact zero leading coefficients are dropped on construction; ``degree``
    additionally ignores leading coefficients that are negligible relative
    to the largest one.
    """

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs, prec=None):
        self.prec = mp.prec if prec is None else prec
        with mpmath.workprec(self.prec):
            cs = [to_mpf(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots, lead=1):
        p = cls([lead])
        for r in roots:
            p = p * cls([-to_mpf(r), 1])
        return p

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        terms = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs)
        return f"UniPoly([{terms}])"

    def is_zero(self):
        return not self.coeffs

    def norm(self):
        return max((abs(c) for c in self.coeffs), default=mp.zero)

    @property
    def degree(self):
        if not self.coeffs:
            return -1
        with mpmath.workprec(self.prec):
            thr = self.norm() * rel_threshold()
            for i in range(len(self.coeffs) - 1, -1, -1):
                if abs(self.coeffs[i]) > thr:
                    return i
        return -1

    def trim(self, digits_margin=10):
        """Drop leading coefficients below ``‖p‖·10^-(digits - margin)``."""
        if not self.coeffs:
            return self
        with mpmath.workprec(self.prec):
            thr = self.norm() * rel_threshold(digits_margin)
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= thr:
            cs.pop()
        return UniPoly(cs, self.prec)

    def __call__(self, x):
        with mpmath.workprec(self.prec):
            acc = mp.zero
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc

    def abs_eval(self, x):
        """Sum of |c_i|·|x|^i; the natural scale for a relative residual."""
        with mpmath.workprec(self.prec):
            ax = abs(x)
            acc = mp.zero
            for c in reversed(self.coeffs):
                acc = acc * ax + abs(c)
            return acc

    def derivative(self, k=1):
        cs = list(self.coeffs)
        with mpmath.workprec(self.prec):
            for _ in range(k):
                cs = [i * cs[i] for i in range(1, len(cs))]
        return UniPoly(cs, self.prec)

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.prec)

    def __add__(self, other):
        if _is_scalar(other):
            other = UniPoly([other], self.prec)
        _check_prec(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (mp.zero,) * (n - len(self.coeffs))
        b = other.coeffs + (mp.zero,) * (n - len(other.coeffs))
        with mpmath.workprec(self.prec):
            return UniPoly([x + y for x, y in zip(a, b)], self.prec)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        with mpmath.workprec(self.prec):
            if _is_scalar(other):
                s = to_mpf(other)
                return UniPoly([c * s for c in self.coeffs], self.prec)
            _check_prec(self, other)
            if not self.coeffs or not other.coeffs:
                return UniPoly([], self.prec)
            out = [mp.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return UniPoly(out, self.prec)

    __rmul__ = __mul__

    def reversed(self, n=None):
        """``x^n p(1/x)`` with ``n`` defaulting to the stored length minus one."""
        n = len(self.coeffs) - 1 if n is None else n
        cs = list(self.coeffs) + [mp.zero] * (n + 1 - len(self.coeffs))
        return UniPoly(cs[::-1], self.prec)

    def taylor_shift(self, a):
        """Coefficients of ``p(x + a)`` (Horner-style synthetic division)."""
        with mpmath.workprec(self.prec):
            a = to_mpf(a)
            cs = list(self.coeffs)
            n = len(cs)
            for i in range(n):
                for j in range(n - 2, i - 1, -1):
                    cs[j] += a * cs[j + 1]
            return UniPoly(cs, self.prec)

    def compose_affine(self, a, b):
        """Coefficients of ``p(a + b·x)``."""
        shifted = self.taylor_shift(a)
        with mpmath.workprec(self.prec):
            b = to_mpf(b)
            scale = mp.one
            out = []
            for c in shifted.coeffs:
                out.append(c * scale)
                scale *= b
            return UniPoly(out, self.prec)

    def divide_circle(self, digits_margin=10):
        """Strip factors ``(1 + x^2)`` that divide ``p`` up to rounding.

        Returns ``(quotient, k)`` where ``k`` factors were removed.
        """
        p, k = self, 0
        while len(p.coeffs) >= 3:
            q, r0, r1 = _div_circle(list(p.coeffs))
            with mpmath.workprec(self.prec):
                thr = p.norm() * rel_threshold(digits_margin)
            if abs(r0) > thr or abs(r1) > thr:
                break
            p, k = UniPoly(q, self.prec), k + 1
        return p, k


def _div_circle(a):
    """Divide coefficient list ``a`` by ``x^2 + 1``: returns (q, r0, r1)."""
    n = len(a) - 1
    q = [None] * (n - 1)
    for k in range(n, 1, -1):
        upper = q[k] if k <= n - 2 else 0
        q[k - 2] = a[k] - upper
    r1 = a[1] - (q[1] if n - 2 >= 1 else 0)
    r0 = a[0] - q[0]
    return q, r0, r1


class BiPoly:
    """Polynomial in ``(t, t1)`` stored as ``rows[i][j]`` = coefficient of t^i·t1^j."""

    __slots__ = ("rows", "prec")

    def __init__(self, rows, prec=None):
        self.prec = mp.prec if prec is None else prec
        width = max((len(r) for r in rows), default=0)
        with mpmath.workprec(self.prec):
            grid = [[to_mpf(c) for c in r] + [mp.zero] * (width - len(r)) for r in rows]
        while grid and not any(grid[-1]):
            grid.pop()
        while grid and grid[0] and not any(r[-1] for r in grid):
            for r in grid:
                r.pop()
        if grid and not grid[0]:
            grid = []
        self.rows = tuple(tuple(r) for r in grid)

    @classmethod
    def constant(cls, c):
        return cls([[c]])

    def __repr__(self):
        return f"BiPoly(deg_t={self.deg_t}, deg_t1={self.deg_t1})"

    @property
    def deg_t(self):
        return len(self.rows) - 1

    @property
    def deg_t1(self):
        return len(self.rows[0]) - 1 if self.rows else -1

    def is_zero(self):
        return not self.rows

    def norm(self):
        return max((abs(c) for r in self.rows for c in r), default=mp.zero)

    def coefficient(self, i, j):
        if i < len(self.rows) and j < len(self.rows[i]):
            return self.rows[i][j]
        return mp.zero

    def __call__(self, t, t1):
        with mpmath.workprec(self.prec):
            acc = mp.zero
            for row in reversed(self.rows):
                inner = mp.zero
                for c in reversed(row):
                    inner = inner * t1 + c
                acc = acc * t + inner
            return acc

    def abs_eval(self, t, t1):
        with mpmath.workprec(self.prec):
            return self.map_abs()(abs(t), abs(t1))

    def map_abs(self):
        return BiPoly([[abs(c) for c in r] for r in self.rows], self.prec)

    def relative_residual(self, t, t1):
        """``|f(t, t1)| / Σ|c_ij||t|^i|t1|^j``; 0 for the zero polynomial."""
        with mpmath.workprec(self.prec):
            scale = self.abs_eval(t, t1)
            if not scale:
                return mp.zero
            return abs(self(t, t1)) / scale

    def in_t1(self, v):
        """Specialise ``t1 = v``: univariate polynomial in ``t``."""
        with mpmath.workprec(self.prec):
            out = []
            for row in self.rows:
                acc = mp.zero
                for c in reversed(row):
                    acc = acc * v + c
                out.append(acc)
            return out if isinstance(v, mpmath.mpc) else UniPoly(out, self.prec)

    def in_t(self, v):
        """Specialise ``t = v``: univariate polynomial in ``t1``."""
        return self.transpose().in_t1(v)

    def transpose(self):
        if not self.rows:
            return self
        return BiPoly([list(col) for col in zip(*self.rows)], self.prec)

    def __neg__(self):
        return BiPoly([[-c for c in r] for r in self.rows], self.prec)

    def __add__(self, other):
        if _is_scalar(other):
            other = BiPoly.constant(other)
        _check_prec(self, other)
        n = max(len(self.rows), len(other.rows))
        m = max(self.deg_t1, other.deg_t1) + 1
        with mpmath.workprec(self.prec):
            out = [[mp.zero] * m for _ in range(n)]
            for src in (self.rows, other.rows):
                for i, r in enumerate(src):
                    o = out[i]
                    for j, c in enumerate(r):
                        o[j] += c
            return BiPoly(out, self.prec)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        with mpmath.workprec(self.prec):
            if _is_scalar(other):
                s = to_mpf(other)
                return BiPoly([[c * s for c in r] for r in self.rows], self.prec)
            _check_prec(self, other)
            if not self.rows or not other.rows:
                return BiPoly([], self.prec)
            n = len(self.rows) + len(other.rows) - 1
            m = self.deg_t1 + other.deg_t1 + 1
            out = [[mp.zero] * m for _ in range(n)]
            for i1, ra in enumerate(self.rows):
                for i2, rb in enumerate(other.rows):
                    o = out[i1 + i2]
                    for j1, a in enumerate(ra):
                        if not a:
                            continue
                        for j2, b in enumerate(rb):
                            if b:
                                o[j1 + j2] += a * b
            return BiPoly(out, self.prec)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = BiPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def diff_t(self):
        with mpmath.workprec(self.prec):
            return BiPoly([[i * c for c in self.rows[i]] for i in range(1, len(self.rows))], self.prec)

    def diff_t1(self):
        with mpmath.workprec(self.prec):
            return BiPoly([[j * r[j] for j in range(1, len(r))] for r in self.rows], self.prec)

    def trim(self, digits_margin=10):
        """Drop outer rows/columns whose entries are all negligible."""
        if not self.rows:
            return self
        with mpmath.workprec(self.prec):
            thr = self.norm() * rel_threshold(digits_margin)
        rows = [list(r) for r in self.rows]
        while rows and all(abs(c) <= thr for c in rows[-1]):
            rows.pop()
        while rows and len(rows[0]) > 1 and all(abs(r[-1]) <= thr for r in rows):
            for r in rows:
                r.pop()
        return BiPoly(rows, self.prec)

    def divide_circle_t(self, digits_margin=10):
        """Strip ``(1 + t^2)`` factors; returns ``(quotient, k)``."""
        p, k = self, 0
        while len(p.rows) >= 3:
            cols = list(zip(*p.rows))
            quotients, ok = [], True
            with mpmath.workprec(self.prec):
                thr = p.norm() * rel_threshold(digits_margin)
                for col in cols:
                    q, r0, r1 = _div_circle(list(col))
                    if abs(r0) > thr or abs(r1) > thr:
                        ok = False
                        break
                    quotients.append(q)
            if not ok:
                break
            p = BiPoly([list(r) for r in zip(*quotients)], self.prec)
            k += 1
        return p, k

    def divide_circle_t1(self, digits_margin=10):
        """Strip ``(1 + t1^2)`` factors; returns ``(quotient, k)``."""
        q, k = self.transpose().divide_circle_t(digits_margin)
        return q.transpose(), k

    def divide_linear_t(self, root):
        """Exact synthetic division by ``(t - root)``; returns ``(quotient, remainder_norm)``."""
        with mpmath.workprec(self.prec):
            root = to_mpf(root)
            m = self.deg_t1 + 1
            q = []
            carry = [mp.zero] * m
            for row in reversed(self.rows):
                cur = [row[j] + carry[j] for j in range(m)]
                q.append(cur)
                carry = [c * root for c in cur]
            rem = q.pop()
            return BiPoly(q[::-1], self.prec), max((abs(c) for c in rem), default=mp.zero)

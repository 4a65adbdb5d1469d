"""Rational expressions in the half-angle parameters of alpha and theta1.

With ``t = tan(alpha/2)`` and ``t1 = tan(theta1/2)`` every quantity of a
slice pose becomes ``N(t, t1) / ((1 + t^2)^pa · (1 + t1^2)^p1)`` with a
polynomial numerator ``N``.  Tracking the two exponents separately keeps
numerators at the smallest degree the algebra allows.
"""

from dataclasses import dataclass

from .polysolve import BiPoly, to_mpf

def _wa(prec):
    return BiPoly([[1], [0], [1]], prec)


def _w1(prec):
    return BiPoly([[1, 0, 1]], prec)


@dataclass(frozen=True)
class HalfExpr:
    num: BiPoly
    pa: int = 0
    p1: int = 0

    @classmethod
    def const(cls, c):
        return cls(BiPoly([[to_mpf(c)]]))

    @classmethod
    def cos_alpha(cls):
        return cls(BiPoly([[1], [0], [-1]]), 1, 0)

    @classmethod
    def sin_alpha(cls):
        return cls(BiPoly([[0], [2]]), 1, 0)

    @classmethod
    def cos_theta1(cls):
        return cls(BiPoly([[1, 0, -1]]), 0, 1)

    @classmethod
    def sin_theta1(cls):
        return cls(BiPoly([[0, 2]]), 0, 1)

    def raised(self, pa, p1):
        """Same value written over the larger denominator exponents ``(pa, p1)``."""
        num = self.num
        for _ in range(pa - self.pa):
            num = num * _wa(num.prec)
        for _ in range(p1 - self.p1):
            num = num * _w1(num.prec)
        return HalfExpr(num, pa, p1)

    def __add__(self, other):
        if not isinstance(other, HalfExpr):
            other = HalfExpr.const(other)
        pa, p1 = max(self.pa, other.pa), max(self.p1, other.p1)
        return HalfExpr(self.raised(pa, p1).num + other.raised(pa, p1).num, pa, p1)

    __radd__ = __add__

    def __neg__(self):
        return HalfExpr(-self.num, self.pa, self.p1)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HalfExpr):
            return HalfExpr(self.num * to_mpf(other), self.pa, self.p1)
        return HalfExpr(self.num * other.num, self.pa + other.pa, self.p1 + other.p1)

    __rmul__ = __mul__

    def value(self, t, t1):
        """Numerical value at finite ``(t, t1)``."""
        den = (1 + t * t) ** self.pa * (1 + t1 * t1) ** self.p1
        return self.num(t, t1) / den


def leg_vectors(geom, l1):
    """(P_i, Q_i) = L_i·(cos theta_i, sin theta_i) for the three legs of a slice pose."""
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    d1, d3 = geom.value("d1"), geom.value("d3")
    cb, sb = geom.cos_beta, geom.sin_beta
    l1 = to_mpf(l1)
    ca, sa = HalfExpr.cos_alpha(), HalfExpr.sin_alpha()
    c1, s1 = HalfExpr.cos_theta1(), HalfExpr.sin_theta1()
    cab = ca * cb - sa * sb
    sab = sa * cb + ca * sb
    p1, q1 = c1 * l1, s1 * l1
    p2 = p1 + ca * d1 - a2x
    q2 = q1 + sa * d1
    p3 = p1 + cab * d3 - a3x
    q3 = q1 + sab * d3 - a3y
    return (p1, q1), (p2, q2), (p3, q3), (c1, s1)


def _zero():
    return HalfExpr(BiPoly([]))


def singularity_expr(geom, l1):
    """L2·L3 times the leg-concurrency residual, as a half-angle expression."""
    (_, _), (p2, q2), (p3, q3), (c1, s1) = leg_vectors(geom, l1)
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    return q2 * a2x * (q3 * c1 - p3 * s1) + (q3 * a3x - p3 * a3y) * (s1 * p2 - c1 * q2)


def cusp_expr(geom, l1):
    """Cusp quadratic form built from the first adjugate row and column."""
    (p1, q1), (p2, q2), (p3, q3), _ = leg_vectors(geom, l1)
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    P, Q = (p1, p2, p3), (q1, q2, q3)

    def S(i, j):
        return Q[i - 1] * P[j - 1] - P[i - 1] * Q[j - 1]

    def C(i, j):
        return P[i - 1] * P[j - 1] + Q[i - 1] * Q[j - 1]

    k1 = (q2 * (a3x - a2x) + S(2, 3) - p2 * a3y) * 2
    k2 = (S(1, 3) + q3 * a3x - p3 * a3y) * -2
    k3 = (q3 * (a3x - a2x) + S(2, 3) - p3 * a3y) * -2
    k4 = (S(1, 3) + q1 * a3x - p1 * a3y) * 2
    k5 = (S(1, 2) + q2 * a2x) * -2
    k6 = (S(1, 2) + q1 * a2x) * 2
    c21, c23, c31 = C(2, 1), C(2, 3), C(3, 1)
    z = _zero()
    h1 = (
        ((p1 * a2x + c21) * 2, c21 * -2, z),
        (c21 * -2, (p2 * a2x - c21) * -2, z),
        (z, z, z),
    )
    h2 = (
        (z, z, z),
        (z, (p2 * (a2x - a3x) - c23 - q2 * a3y) * -2, c23 * -2),
        (z, c23 * -2, (p3 * (a2x - a3x) + c23 - q3 * a3y) * 2),
    )
    h3 = (
        ((p1 * a3x + c31 + q1 * a3y) * 2, z, c31 * -2),
        (z, z, z),
        (c31 * -2, z, (c31 - p3 * a3x - q3 * a3y) * 2),
    )
    u = (k1 * k2, -(k2 * k5), k3 * k5)
    v = (k1 * k2, k3 * k4, -(k1 * k4))
    # M = sum_i u_i H_i, then v^T M v; zero entries are skipped
    acc = None
    for a in range(3):
        for b in range(3):
            m_ab = None
            for ui, h in zip(u, (h1, h2, h3)):
                if h[a][b].num.is_zero():
                    continue
                term = ui * h[a][b]
                m_ab = term if m_ab is None else m_ab + term
            if m_ab is None:
                continue
            term = v[a] * m_ab * v[b]
            acc = term if acc is None else acc + term
    return acc if acc is not None else _zero()


def slice_map_cusp_expr(geom, l1):
    """Cusp condition of the slice map (alpha, theta1) -> (L2^2, L3^2).

    Returns ``(D, C)``: ``D`` is the Jacobian determinant of the map, whose
    zero set is the singular curve, and ``C`` is the derivative of ``D``
    along the kernel direction of the map.  A cusp of the joint-space image
    is a point of ``D = 0`` where the kernel is tangent to that curve, so
    ``C`` vanishes.  Unlike the Hessian form this needs no rigidity model
    of the platform and stays meaningful for a flat platform.
    """
    (_, _), (p2, q2), (p3, q3), (c1, s1) = leg_vectors(geom, l1)
    d1, d3 = geom.value("d1"), geom.value("d3")
    cb, sb = geom.cos_beta, geom.sin_beta
    l1 = to_mpf(l1)
    ca, sa = HalfExpr.cos_alpha(), HalfExpr.sin_alpha()
    cab = ca * cb - sa * sb
    sab = sa * cb + ca * sb

    def partials(p, q, d, c, s):
        # first and second derivatives of p^2 + q^2 in alpha and theta1
        fa = (q * c - p * s) * (2 * d)
        ft = (q * c1 - p * s1) * (2 * l1)
        faa = ((p * c + q * s) * -d + d * d) * 2
        ftt = ((p * c1 + q * s1) * -l1 + l1 * l1) * 2
        fat = (s * s1 + c * c1) * (2 * d * l1)
        return fa, ft, faa, ftt, fat

    f2a, f2t, f2aa, f2tt, f2at = partials(p2, q2, d1, ca, sa)
    f3a, f3t, f3aa, f3tt, f3at = partials(p3, q3, d3, cab, sab)
    det = f2a * f3t - f2t * f3a
    det_a = f2aa * f3t + f2a * f3at - f2at * f3a - f2t * f3aa
    det_t = f2at * f3t + f2a * f3tt - f2tt * f3a - f2t * f3at
    return det, det_t * f2a - det_a * f2t


def wrap_factor(expr, t, t1):
    """Positive denominator ``(1 + t^2)^pa (1 + t1^2)^p1`` of ``expr`` at ``(t, t1)``."""
    return (1 + t * t) ** expr.pa * (1 + t1 * t1) ** expr.p1


__all__ = ["HalfExpr", "cusp_expr", "leg_vectors", "singularity_expr", "slice_map_cusp_expr", "wrap_factor"]

"""Manipulator parameters and conversions between pose, leg angles and leg lengths.

Frame: A1 at the origin, A2 on the x axis, A3 = (a3x, a3y).  The platform
vertex B1 sits at distance L1 from A1 along angle theta1; B2 is reached from
B1 along the platform orientation alpha, and B3 along alpha + beta, where
beta is the interior platform angle at B1.

Values are stored as exact fractions (decimal input is taken literally) and
converted to mpf at whatever precision the caller is working in.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from mpmath import mp

from .polysolve.precision import to_mpf
from .errors import CollinearBase, DegenerateLeg, NonPositiveSide, TriangleInequalityViolated

FIELDS = ("a2x", "a3x", "a3y", "d1", "d2", "d3")
DEFAULT_LEG_EPS = 1e-8


def exact_number(value, name="value"):
    """Exact rational value of an int, decimal float, numeric string or mpf."""
    if isinstance(value, bool):
        raise TypeError(f"{name} must be numeric")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, mp.mpf):
        man, exp = value.man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"{name} must be numeric, got {type(value).__name__}")


def _mpf(q):
    return mp.mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class ManipulatorGeometry:
    a2x: Fraction
    a3x: Fraction
    a3y: Fraction
    d1: Fraction
    d2: Fraction
    d3: Fraction

    def value(self, name):
        """Field ``name`` as an mpf at the current precision."""
        return _mpf(getattr(self, name))

    @property
    def cos_beta_exact(self):
        return (self.d1**2 + self.d3**2 - self.d2**2) / (2 * self.d1 * self.d3)

    @property
    def cos_beta(self):
        return _mpf(self.cos_beta_exact)

    @property
    def sin_beta(self):
        c = self.cos_beta_exact
        return mp.sqrt(_mpf(1 - c * c))

    @property
    def beta(self):
        return mp.acos(self.cos_beta)

    @property
    def h(self):
        """Altitude of the platform triangle from B3 onto the line B1B2."""
        return _mpf(self.d3) * self.sin_beta

    def as_dict(self):
        return {k: float(getattr(self, k)) for k in FIELDS}


def validate_geometry(raw=None, **fields):
    """Build a checked :class:`ManipulatorGeometry` from six numeric fields.

    ``raw`` may be a mapping (e.g. parsed JSON); keyword arguments override it.
    """
    data = dict(raw or {})
    data.update(fields)
    missing = [k for k in FIELDS if k not in data]
    if missing:
        raise KeyError(f"missing geometry fields: {', '.join(missing)}")
    vals = {k: exact_number(data[k], k) for k in FIELDS}
    for k in ("d1", "d2", "d3"):
        if vals[k] <= 0:
            raise NonPositiveSide(f"{k} must be positive, got {float(vals[k])}")
    d1, d2, d3 = vals["d1"], vals["d2"], vals["d3"]
    # equality is a flat platform (B3 on the line B1B2), which is kinematically valid
    if d1 + d2 < d3 or d2 + d3 < d1 or d3 + d1 < d2:
        raise TriangleInequalityViolated(f"platform sides {float(d1)}, {float(d2)}, {float(d3)} do not form a triangle")
    if vals["a3y"] == 0:
        raise CollinearBase("a3y = 0 puts the three base anchors on one line")
    if vals["a2x"] == 0:
        raise CollinearBase("a2x = 0 makes A1 and A2 coincide")
    return ManipulatorGeometry(**vals)


@dataclass(frozen=True)
class Configuration:
    """Leg lengths ``L`` and leg angles ``theta`` (radians)."""

    L: tuple
    theta: tuple


@dataclass(frozen=True)
class SlicePose:
    l1: object
    alpha: object
    theta1: object

    def __post_init__(self):
        if not to_mpf(self.l1) > 0:
            raise ValueError("l1 must be positive")


class JointCoordinates(NamedTuple):
    L2: object
    L3: object
    theta2: object
    theta3: object


def wrap_angle(x):
    """Wrap to the half-open interval (-pi, pi]."""
    two_pi = 2 * mp.pi
    y = x - two_pi * mp.floor(x / two_pi)
    if y > mp.pi:
        y -= two_pi
    return y


def platform_vertices(geom, pose):
    """Positions of B1, B2, B3 for a slice pose."""
    l1 = to_mpf(pose.l1)
    a, t1 = to_mpf(pose.alpha), to_mpf(pose.theta1)
    d1, d3 = geom.value("d1"), geom.value("d3")
    cb, sb = geom.cos_beta, geom.sin_beta
    ca, sa = mp.cos(a), mp.sin(a)
    b1 = (l1 * mp.cos(t1), l1 * mp.sin(t1))
    b2 = (b1[0] + d1 * ca, b1[1] + d1 * sa)
    b3 = (b1[0] + d3 * (ca * cb - sa * sb), b1[1] + d3 * (sa * cb + ca * sb))
    return b1, b2, b3


def leg_lengths(geom, pose):
    """(L2, L3) of a slice pose; never raises."""
    _, b2, b3 = platform_vertices(geom, pose)
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    return mp.hypot(b2[0] - a2x, b2[1]), mp.hypot(b3[0] - a3x, b3[1] - a3y)


def pose_to_joints(geom, pose, eps=DEFAULT_LEG_EPS):
    """Leg lengths and leg angles of a slice pose.

    Raises :class:`DegenerateLeg` when L2 or L3 falls below ``eps``; the
    exception still carries both lengths.
    """
    _, b2, b3 = platform_vertices(geom, pose)
    x2, y2 = b2[0] - geom.value("a2x"), b2[1]
    x3, y3 = b3[0] - geom.value("a3x"), b3[1] - geom.value("a3y")
    l2, l3 = mp.hypot(x2, y2), mp.hypot(x3, y3)
    bad = [name for name, val in (("L2", l2), ("L3", l3)) if val < eps]
    if bad:
        raise DegenerateLeg(f"{' and '.join(bad)} below {eps}", l2=l2, l3=l3, legs=bad)
    return JointCoordinates(l2, l3, mp.atan2(y2, x2), mp.atan2(y3, x3))


def configuration_from_pose(geom, pose, eps=DEFAULT_LEG_EPS):
    j = pose_to_joints(geom, pose, eps)
    return Configuration(
        L=(to_mpf(pose.l1), j.L2, j.L3),
        theta=(wrap_angle(to_mpf(pose.theta1)), j.theta2, j.theta3),
    )


def vertex_positions(geom, config):
    """b1, b2, b3 from leg lengths and leg angles."""
    L1, L2, L3 = (to_mpf(x) for x in config.L)
    t1, t2, t3 = (to_mpf(x) for x in config.theta)
    b1 = (L1 * mp.cos(t1), L1 * mp.sin(t1))
    b2 = (geom.value("a2x") + L2 * mp.cos(t2), L2 * mp.sin(t2))
    b3 = (geom.value("a3x") + L3 * mp.cos(t3), geom.value("a3y") + L3 * mp.sin(t3))
    return b1, b2, b3


def constraint_residuals(geom, config):
    """Squared-distance residuals of the three platform sides."""
    b1, b2, b3 = vertex_positions(geom, config)

    def sq(p, q):
        return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2

    return (
        sq(b2, b1) - geom.value("d1") ** 2,
        sq(b3, b2) - geom.value("d2") ** 2,
        sq(b1, b3) - geom.value("d3") ** 2,
    )


def pose_from_vertices(geom, b1, b2):
    """Slice pose (l1, alpha, theta1) from the positions of B1 and B2."""
    l1 = mp.hypot(*b1)
    return SlicePose(l1, mp.atan2(b2[1] - b1[1], b2[0] - b1[0]), mp.atan2(b1[1], b1[0]))

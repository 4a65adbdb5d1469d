"""Differential kinematics (Jacobian, adjugate, Hessians), singularity and cusp
residuals, and the direct kinematics problem with coincidence detection.

Everything is evaluated at the current mpmath precision from the leg
lengths and leg angles of a :class:`~rprcusps.geometry.Configuration`.
"""

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import ZeroAdjoint
from .geometry import Configuration, SlicePose, constraint_residuals, platform_vertices, wrap_angle
from .polysolve import BiPoly, real_roots, sylvester_resultant_in_t, to_mpf

DEFAULT_CLUSTER_TOL = 1e-3
DEFAULT_MODE_TOL = 1e-6


class _Trig:
    """Leg lengths, sines/cosines and pairwise differences of one configuration."""

    def __init__(self, geom, config):
        self.a2x, self.a3x, self.a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
        self.L = tuple(to_mpf(x) for x in config.L)
        th = tuple(to_mpf(x) for x in config.theta)
        self.s = tuple(mp.sin(x) for x in th)
        self.c = tuple(mp.cos(x) for x in th)
        self.th = th

    def sd(self, i, j):
        """sin(theta_i - theta_j), 1-based indices."""
        return mp.sin(self.th[i - 1] - self.th[j - 1])

    def cd(self, i, j):
        return mp.cos(self.th[i - 1] - self.th[j - 1])


@dataclass(frozen=True)
class ConstraintJacobian:
    m: tuple

    @property
    def det(self):
        return _det3(self.m)

    def scaled_det(self):
        """det / ||J||^3, a unit-free singularity measure."""
        n = mp.sqrt(mpmath.fsum(x * x for row in self.m for x in row))
        return self.det / n**3 if n else mp.zero


@dataclass(frozen=True)
class AdjointData:
    k: tuple
    adj: tuple
    u: tuple
    v: tuple


@dataclass(frozen=True)
class ConstraintHessians:
    H1: tuple
    H2: tuple
    H3: tuple

    def __iter__(self):
        return iter((self.H1, self.H2, self.H3))


@dataclass(frozen=True)
class AssemblyMode:
    theta: tuple
    residual: object
    cluster_id: int = 0
    alpha: object = None


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _k_values(T):
    L1, L2, L3 = T.L
    s, c = T.s, T.c
    a2x, a3x, a3y = T.a2x, T.a3x, T.a3y
    k1 = 2 * L2 * ((a3x - a2x) * s[1] + L3 * T.sd(2, 3) - a3y * c[1])
    k2 = -2 * L3 * (L1 * T.sd(1, 3) + a3x * s[2] - a3y * c[2])
    k3 = -2 * L3 * ((a3x - a2x) * s[2] + L2 * T.sd(2, 3) - a3y * c[2])
    k4 = 2 * L1 * (L3 * T.sd(1, 3) + a3x * s[0] - a3y * c[0])
    k5 = -2 * L2 * (L1 * T.sd(1, 2) + a2x * s[1])
    k6 = 2 * L1 * (L2 * T.sd(1, 2) + a2x * s[0])
    return (k1, k2, k3, k4, k5, k6)


def jacobian(geom, config):
    """d(Gamma)/d(theta): rows are the three side constraints, columns the leg angles."""
    T = _Trig(geom, config)
    L1, L2, L3 = T.L
    s, c = T.s, T.c
    a2x, a3x, a3y = T.a2x, T.a3x, T.a3y
    z = mp.zero
    m = (
        (2 * L1 * (a2x * s[0] + L2 * T.sd(1, 2)), 2 * L2 * (L1 * T.sd(2, 1) - a2x * s[1]), z),
        (
            z,
            -2 * L2 * ((a2x - a3x) * s[1] - L3 * T.sd(2, 3) + a3y * c[1]),
            2 * L3 * ((a2x - a3x) * s[2] - L2 * T.sd(2, 3) + a3y * c[2]),
        ),
        (2 * L1 * (a3x * s[0] - L3 * T.sd(3, 1) - a3y * c[0]), z, -2 * L3 * (a3x * s[2] - L1 * T.sd(3, 1) - a3y * c[2])),
    )
    return ConstraintJacobian(m)


def _adj_from_k(k):
    k1, k2, k3, k4, k5, k6 = k
    return (
        (k1 * k2, -k2 * k5, k3 * k5),
        (k3 * k4, k2 * k6, -k3 * k6),
        (-k1 * k4, k4 * k5, k1 * k6),
    )


def _unit(vec):
    n = mp.sqrt(mpmath.fsum(x * x for x in vec))
    return tuple(x / n for x in vec)


def adjoint_and_kernels(geom, config):
    """Adjugate of the Jacobian and unit left/right kernel directions.

    ``u`` is the largest-norm row and ``v`` the largest-norm column of the
    adjugate; at a rank-2 Jacobian they span the left and right kernels.
    """
    T = _Trig(geom, config)
    k = _k_values(T)
    adj = _adj_from_k(k)
    rows = list(adj)
    cols = [tuple(adj[r][c] for r in range(3)) for c in range(3)]

    def norm2(vec):
        return mpmath.fsum(x * x for x in vec)

    best_row = max(rows, key=norm2)
    best_col = max(cols, key=norm2)
    kscale = max(abs(x) for x in k) ** 2
    tiny = kscale * mp.mpf(2) ** (-(mp.prec - 16))
    if not kscale or norm2(best_row) <= tiny**2 or norm2(best_col) <= tiny**2:
        raise ZeroAdjoint("adjugate vanishes: Jacobian rank is at most one")
    return AdjointData(k=k, adj=adj, u=_unit(best_row), v=_unit(best_col))


def hessians(geom, config):
    """Second derivatives of each constraint with respect to the leg angles."""
    T = _Trig(geom, config)
    L1, L2, L3 = T.L
    s, c = T.s, T.c
    a2x, a3x, a3y = T.a2x, T.a3x, T.a3y
    z = mp.zero
    c21, c23, c31 = T.cd(2, 1), T.cd(2, 3), T.cd(3, 1)
    h1 = (
        (2 * L1 * (a2x * c[0] + L2 * c21), -2 * L1 * L2 * c21, z),
        (-2 * L1 * L2 * c21, -2 * L2 * (a2x * c[1] - L1 * c21), z),
        (z, z, z),
    )
    h2 = (
        (z, z, z),
        (z, -2 * L2 * ((a2x - a3x) * c[1] - L3 * c23 - a3y * s[1]), -2 * L2 * L3 * c23),
        (z, -2 * L2 * L3 * c23, 2 * L3 * ((a2x - a3x) * c[2] + L2 * c23 - a3y * s[2])),
    )
    h3 = (
        (2 * L1 * (a3x * c[0] + L3 * c31 + a3y * s[0]), z, -2 * L1 * L3 * c31),
        (z, z, z),
        (-2 * L1 * L3 * c31, z, 2 * L3 * (L1 * c31 - a3x * c[2] - a3y * s[2])),
    )
    return ConstraintHessians(h1, h2, h3)


def singularity_residual(geom, theta):
    """Concurrency of the three leg lines; zero exactly at singular configurations."""
    t1, t2, t3 = (to_mpf(x) for x in theta)
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    return a2x * mp.sin(t2) * mp.sin(t3 - t1) + (a3x * mp.sin(t3) - a3y * mp.cos(t3)) * mp.sin(t1 - t2)


def _quadratic_form(u, hs, v):
    acc = mp.zero
    for ui, h in zip(u, hs):
        if not ui:
            continue
        for a in range(3):
            for b in range(3):
                if h[a][b]:
                    acc += ui * v[a] * h[a][b] * v[b]
    return acc


def cusp_residual(geom, config):
    """v^T (sum_i u_i H_i) v with unit kernel vectors; zero at cusps."""
    data = adjoint_and_kernels(geom, config)
    return _quadratic_form(data.u, hessians(geom, config), data.v)


def cusp_form(geom, config):
    """The same quadratic form using the first adjugate row and column, unnormalised.

    This is the exact expression that the slice polynomial of the cusp
    condition clears of denominators, so it serves as its direct oracle.
    """
    T = _Trig(geom, config)
    adj = _adj_from_k(_k_values(T))
    u = adj[0]
    v = tuple(adj[r][0] for r in range(3))
    return _quadratic_form(u, hessians(geom, config), v)


# ---------------------------------------------------------------- direct kinematics


def _lin_coeffs(geom, L):
    """(P, Q, R) triples for both closure equations as (a, b, c) in a + b·c1 + c·s1.

    Closure i reads P·cos(alpha) + Q·sin(alpha) + R = 0.
    """
    L1, L2, L3 = L
    a2x, a3x, a3y = geom.value("a2x"), geom.value("a3x"), geom.value("a3y")
    d1, d3 = geom.value("d1"), geom.value("d3")
    cb, sb = geom.cos_beta, geom.sin_beta
    eq_a = (
        (-2 * d1 * a2x, 2 * d1 * L1, mp.zero),
        (mp.zero, mp.zero, 2 * d1 * L1),
        (L1**2 + a2x**2 + d1**2 - L2**2, -2 * a2x * L1, mp.zero),
    )
    eq_b = (
        (-2 * d3 * (cb * a3x + sb * a3y), 2 * d3 * cb * L1, 2 * d3 * sb * L1),
        (2 * d3 * (sb * a3x - cb * a3y), -2 * d3 * sb * L1, 2 * d3 * cb * L1),
        (L1**2 + a3x**2 + a3y**2 + d3**2 - L3**2, -2 * L1 * a3x, -2 * L1 * a3y),
    )
    return eq_a, eq_b


def _half_angle_t1(abc):
    """(1 + t1^2)·(a + b·c1 + c·s1) as ascending coefficients in t1."""
    a, b, c = abc
    return [a + b, 2 * c, a - b]


def _closure_bipoly(eq):
    P, Q, R = (_half_angle_t1(x) for x in eq)
    rows = [
        [r + p for r, p in zip(R, P)],
        [2 * q for q in Q],
        [r - p for r, p in zip(R, P)],
    ]
    return BiPoly(rows)


def _eval_lin(abc, c1, s1):
    a, b, c = abc
    return a + b * c1 + c * s1


def _alphas_at(eq_a, eq_b, c1, s1):
    """Platform orientations satisfying both closures for a given theta1."""
    PA, QA, RA = (_eval_lin(x, c1, s1) for x in eq_a)
    PB, QB, RB = (_eval_lin(x, c1, s1) for x in eq_b)
    det = PA * QB - PB * QA
    scale = (abs(PA) + abs(QA)) * (abs(PB) + abs(QB))
    if scale and abs(det) > scale * mp.mpf(10) ** (-(mp.dps // 3)):
        ca = (QA * RB - QB * RA) / det
        sa = (PB * RA - PA * RB) / det
        return [mp.atan2(sa, ca)], True
    out = []
    rho = mp.hypot(PA, QA)
    if not rho:
        return out, False
    ratio = -RA / rho
    if abs(ratio) > 1 + mp.mpf(10) ** (-(mp.dps // 3)):
        return out, False
    phi = mp.atan2(QA, PA)
    spread = mp.acos(max(-mp.one, min(mp.one, ratio)))
    tol = (abs(PB) + abs(QB) + abs(RB)) * mp.mpf(10) ** (-(mp.dps // 4))
    for a in (phi + spread, phi - spread):
        if abs(PB * mp.cos(a) + QB * mp.sin(a) + RB) <= tol:
            if all(abs(wrap_angle(a - b)) > mp.mpf(10) ** (-(mp.dps // 3)) for b in out):
                out.append(a)
    return out, False


def _mode_from_pose(geom, L, theta1, alpha):
    pose = SlicePose(L[0], alpha, theta1)
    _, b2, b3 = platform_vertices(geom, pose)
    th2 = mp.atan2(b2[1], b2[0] - geom.value("a2x"))
    th3 = mp.atan2(b3[1] - geom.value("a3y"), b3[0] - geom.value("a3x"))
    theta = (wrap_angle(theta1), th2, th3)
    res = constraint_residuals(geom, Configuration(L=L, theta=theta))
    scale = max(geom.value(k) ** 2 for k in ("d1", "d2", "d3"))
    return theta, max(abs(r) for r in res) / scale


def _angle_distance(a, b):
    return max(abs(wrap_angle(x - y)) for x, y in zip(a, b))


def _cluster_ids(thetas, tol):
    parent = list(range(len(thetas)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            if _angle_distance(thetas[i], thetas[j]) < tol:
                parent[find(i)] = find(j)
    roots, ids = {}, []
    for i in range(len(thetas)):
        ids.append(roots.setdefault(find(i), len(roots)))
    return ids


def dkp_polynomial(geom, L):
    """Univariate polynomial in tan(theta1/2) whose real roots carry all assembly modes."""
    eq_a, eq_b = _lin_coeffs(geom, L)
    res = sylvester_resultant_in_t(_closure_bipoly(eq_a), _closure_bipoly(eq_b))
    res, _ = res.divide_circle()
    return res


def direct_kinematics(geom, L, cluster_tol=DEFAULT_CLUSTER_TOL, mode_tol=DEFAULT_MODE_TOL):
    """All real assembly modes for leg lengths ``L`` (empty when unreachable).

    Roots of the sextic that cannot be separated within a quarter of
    ``cluster_tol`` are treated as coincident and returned as that many
    copies of one mode, so a triple root always yields three modes.
    """
    L = tuple(to_mpf(x) for x in L)
    if any(x < 0 for x in L):
        raise ValueError("leg lengths must be non-negative")
    eq_a, eq_b = _lin_coeffs(geom, L)
    poly = dkp_polynomial(geom, L)
    found = []
    if poly.degree > 0:
        for r in real_roots(poly, cluster_width=to_mpf(cluster_tol) / 4):
            th1 = 2 * mp.atan(r.estimate)
            alphas, unique = _alphas_at(eq_a, eq_b, mp.cos(th1), mp.sin(th1))
            copies = r.multiplicity_hint if (unique or len(alphas) == 1) else 1
            for a in alphas:
                found.extend([(th1, a)] * copies)
    # theta1 = pi is the point at infinity of the half-angle parameter
    alphas, _ = _alphas_at(eq_a, eq_b, -mp.one, mp.zero)
    for a in alphas:
        if not any(abs(wrap_angle(th1 - mp.pi)) < mp.mpf(10) ** (-(mp.dps // 3)) and abs(wrap_angle(a - b)) < mp.mpf(10) ** (-(mp.dps // 3)) for th1, b in found):
            found.append((mp.pi, a))
    modes = []
    for th1, a in found:
        theta, res = _mode_from_pose(geom, L, th1, a)
        if res < mode_tol:
            modes.append((theta, res, a))
    ids = _cluster_ids([m[0] for m in modes], to_mpf(cluster_tol))
    return [AssemblyMode(theta=t, residual=r, cluster_id=i, alpha=a) for (t, r, a), i in zip(modes, ids)]


def coincidence_multiplicity(modes, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Size of the largest group of modes whose angle triples agree within ``cluster_tol``."""
    if not modes:
        return 0
    ids = _cluster_ids([m.theta for m in modes], to_mpf(cluster_tol))
    return max(ids.count(i) for i in set(ids))


def cluster_spread(modes, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Largest intra-cluster angle distance of the biggest cluster."""
    if not modes:
        return mp.zero
    ids = _cluster_ids([m.theta for m in modes], to_mpf(cluster_tol))
    best = max(set(ids), key=ids.count)
    members = [m.theta for m, i in zip(modes, ids) if i == best]
    return max((_angle_distance(a, b) for a in members for b in members), default=mp.zero)

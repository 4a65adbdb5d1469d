"""Sylvester resultant with respect to ``t`` by evaluation and interpolation.

The resultant ``R(t1)`` is sampled at ``K`` points on the unit circle of the
complex ``t1`` plane, where every sample is a numeric Sylvester determinant,
and its monomial coefficients are recovered by an inverse DFT.  Unit-circle
nodes keep the interpolation perfectly conditioned in the monomial basis;
real nodes would amplify rounding exponentially with the degree.
"""

from concurrent.futures import ProcessPoolExecutor

import mpmath
from mpmath import mp

from ..errors import DegenerateResultant, LeadingCoefficientCollapse
from .poly import UniPoly, _check_prec
from .precision import to_mpf


def sylvester_matrix(fc, gc):
    """Sylvester matrix of two coefficient lists given in ascending order."""
    m, n = len(fc) - 1, len(gc) - 1
    size = m + n
    fd, gd = fc[::-1], gc[::-1]
    mat = []
    for i in range(n):
        mat.append([mp.zero] * i + list(fd) + [mp.zero] * (size - m - 1 - i))
    for i in range(m):
        mat.append([mp.zero] * i + list(gd) + [mp.zero] * (size - n - 1 - i))
    return mat


def determinant(mat):
    """Gaussian elimination with partial pivoting; works for mpf or mpc entries."""
    a = [list(r) for r in mat]
    n = len(a)
    det = mp.one
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if not a[piv][col]:
            return mp.zero
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        prow = a[col]
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                row = a[r]
                for c in range(col + 1, n):
                    row[c] -= factor * prow[c]
    return det


def _eval_rows(rows, z):
    out = []
    for row in rows:
        acc = mp.zero
        for c in reversed(row):
            acc = acc * z + c
        out.append(acc)
    return out


def _sample(prec, f_rows, g_rows, points):
    """Resultant values and Hadamard scales at a batch of nodes."""
    with mpmath.workprec(prec):
        values, scales = [], []
        for z in points:
            fc = _eval_rows(f_rows, z)
            gc = _eval_rows(g_rows, z)
            values.append(determinant(sylvester_matrix(fc, gc)))
            nf = mpmath.sqrt(mpmath.fsum(abs(c) ** 2 for c in fc))
            ng = mpmath.sqrt(mpmath.fsum(abs(c) ** 2 for c in gc))
            scales.append(nf ** (len(gc) - 1) * ng ** (len(fc) - 1))
        return values, scales


def _chunks(seq, k):
    size = max(1, -(-len(seq) // k))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def sylvester_resultant_in_t(f, g, sample_offset=0, jobs=1, degree_bound=None):
    """Resultant of two ``BiPoly`` in ``t`` as a ``UniPoly`` in ``t1``.

    ``sample_offset`` rotates the unit-circle nodes by that fraction of a
    node spacing (any value gives the same polynomial up to rounding).
    ``jobs > 1`` evaluates determinants in worker processes; the assembly
    is index-ordered, so the result does not depend on scheduling.
    """
    _check_prec(f, g)
    with mpmath.workprec(f.prec):
        f, g = f.trim(), g.trim()
        if f.is_zero() or g.is_zero():
            raise LeadingCoefficientCollapse("an input polynomial vanishes identically")
        m, n = f.deg_t, g.deg_t
        if m == 0 and n == 0:
            return UniPoly([1], f.prec)
        bound = m * g.deg_t1 + n * f.deg_t1
        if degree_bound is not None:
            bound = min(bound, degree_bound)
        K = bound + 1
        off = to_mpf(sample_offset)
        symmetric = not off
        count = K // 2 + 1 if symmetric else K
        nodes = [mpmath.expjpi(2 * (k + off) / K) for k in range(count)]
        f_rows = [list(r) for r in f.rows]
        g_rows = [list(r) for r in g.rows]
        if jobs and jobs > 1 and count > 1:
            parts = _chunks(nodes, jobs)
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_sample, mp.prec, f_rows, g_rows, part) for part in parts]
                results = [fut.result() for fut in futures]
            values = [v for vals, _ in results for v in vals]
            scales = [s for _, sc in results for s in sc]
        else:
            values, scales = _sample(mp.prec, f_rows, g_rows, nodes)
        if symmetric:
            full = list(values)
            for k in range(count, K):
                full.append(mpmath.conj(values[K - k]))
            values = full
        peak = max(abs(v) for v in values)
        if peak <= max(scales) * mp.mpf(10) ** (-(mpmath.mp.dps // 2)):
            raise DegenerateResultant("resultant vanishes identically: common factor in t")
        inv_roots = [mpmath.expjpi(-2 * mp.mpf(r) / K) for r in range(K)]
        coeffs = []
        for j in range(K):
            acc = mpmath.fsum(values[k] * inv_roots[(j * k) % K] for k in range(K))
            if off:
                acc *= mpmath.expjpi(-2 * j * off / K)
            coeffs.append(acc.real / K)
        return UniPoly(coeffs, f.prec).trim()

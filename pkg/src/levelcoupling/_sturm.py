"""Sturm-sequence bisection kernels for symmetric tridiagonal matrices.

Two counting recurrences are provided. ``_count_general`` is the textbook
LDL^T pivot recurrence for arbitrary diagonals ``d`` and squared
off-diagonals ``e2``. ``_count_uniform`` handles the finite-difference
Laplacian case where every off-diagonal equals ``-t``. It works with
``a = V / t`` and ``r_i = q_i / t - 1`` so that the large ``2t`` on the
diagonal never cancels against a small eigenvalue; this keeps roughly full
relative precision for the lowest levels on very fine grids.
"""

import numpy as np
from numba import njit

_TINY = 1e-300
_EPS = np.finfo(np.float64).eps


@njit(cache=True, nogil=True)
def _count_uniform(a, y):
    # number of eigenvalues of (tridiag(-1, 2 + a, -1)) strictly below y
    n = a.shape[0]
    count = 0
    r = 1.0 + a[0] - y
    for i in range(1, n + 1):
        den = 1.0 + r
        if abs(den) < _TINY:
            den = -_TINY
        if den < 0.0:
            count += 1
        if i == n:
            break
        r = r / den + (a[i] - y)
    return count


@njit(cache=True, nogil=True)
def _count_general(d, e2, x, pivmin):
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _bisect(lo_bound, hi_bound, k, maxit, uniform, a, d, e2, pivmin):
    """Lowest ``k`` eigenvalues by bisection with shared bracket updates.

    Returns ``(values, iterations, ok)``; ``ok`` is False when any level
    hit ``maxit`` before its bracket closed.
    """
    lo = np.full(k, lo_bound)
    hi = np.full(k, hi_bound)
    values = np.empty(k)
    total = 0
    ok = True
    for j in range(k):
        it = 0
        while True:
            width = hi[j] - lo[j]
            scale = max(abs(lo[j]), abs(hi[j]))
            if width <= 2.0 * _EPS * scale + _TINY:
                break
            mid = 0.5 * (lo[j] + hi[j])
            if mid <= lo[j] or mid >= hi[j]:
                break
            if it >= maxit:
                ok = False
                break
            if uniform:
                c = _count_uniform(a, mid)
            else:
                c = _count_general(d, e2, mid, pivmin)
            for i in range(j, k):
                if c > i:
                    if mid < hi[i]:
                        hi[i] = mid
                elif mid > lo[i]:
                    lo[i] = mid
            it += 1
        total += it
        values[j] = 0.5 * (lo[j] + hi[j])
    return values, total, ok


@njit(cache=True, nogil=True)
def _count_many_uniform(a, ys, counts):
    # Sturm counts at several shifts in one sweep over the grid
    m = ys.shape[0]
    n = a.shape[0]
    r = np.empty(m)
    for j in range(m):
        r[j] = 1.0 + a[0] - ys[j]
        counts[j] = 0
    for i in range(1, n + 1):
        for j in range(m):
            den = 1.0 + r[j]
            if abs(den) < _TINY:
                den = -_TINY
            if den < 0.0:
                counts[j] += 1
            if i < n:
                r[j] = r[j] / den + (a[i] - ys[j])


@njit(cache=True, nogil=True)
def _multisect_uniform(a, lo_bound, hi_bound, k, maxit):
    """Bisect all ``k`` levels in lockstep: one grid sweep advances every open bracket."""
    lo = np.full(k, lo_bound)
    hi = np.full(k, hi_bound)
    active = np.empty(k, dtype=np.int64)
    mids = np.empty(k)
    counts = np.empty(k, dtype=np.int64)
    passes = 0
    while True:
        m = 0
        for j in range(k):
            width = hi[j] - lo[j]
            scale = max(abs(lo[j]), abs(hi[j]))
            mid = 0.5 * (lo[j] + hi[j])
            if width > 2.0 * _EPS * scale + _TINY and lo[j] < mid < hi[j]:
                active[m] = j
                mids[m] = mid
                m += 1
        if m == 0:
            break
        if passes >= maxit:
            return 0.5 * (lo + hi), passes, False
        _count_many_uniform(a, mids[:m], counts[:m])
        for q in range(m):
            c = counts[q]
            mid = mids[q]
            for i in range(k):
                if c > i:
                    if mid < hi[i]:
                        hi[i] = mid
                elif mid > lo[i]:
                    lo[i] = mid
        passes += 1
    return 0.5 * (lo + hi), passes, True


def lowest_uniform(potential_over_t, k, maxit=512):
    """Lowest ``k`` eigenvalues of ``tridiag(-1, 2 + a, -1)``, in units of the hopping."""
    a = np.ascontiguousarray(potential_over_t, dtype=np.float64)
    return _multisect_uniform(a, float(a.min()), float(a.max()) + 4.0, int(k), maxit)


def lowest_general(diagonal, off_diagonal, k, maxit=512):
    d = np.ascontiguousarray(diagonal, dtype=np.float64)
    e = np.ascontiguousarray(off_diagonal, dtype=np.float64)
    e2 = e * e
    radius = np.zeros_like(d)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    scale = max(abs(lo), abs(hi), 1.0)
    pivmin = _TINY * scale
    return _bisect(lo, hi, k, maxit, False, d, d, e2, pivmin)

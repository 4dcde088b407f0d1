# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: exact subset enumeration and permutation sampling.

Mirrors ``_kernels_py`` function for function. Moment accumulators use Kahan
compensated summation; the fallback uses numpy pairwise reduction, so the two
lanes agree to reduction-order rounding. Sampling kernels consume the same
pre-drawn swap matrices as the fallback and therefore walk identical
permutations.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

BACKEND = "compiled"


cdef inline void _kahan_add(double x, double* acc, double* comp) noexcept nogil:
    cdef double y = x - comp[0]
    cdef double t = acc[0] + y
    comp[0] = (t - acc[0]) - y
    acc[0] = t


cdef void _moments_for_player(const double* values, Py_ssize_t total, int i,
                              const double* wsize, double* out_v,
                              double* out_e2) noexcept nogil:
    # Subsets without player i, enumerated as (high bits | low bits) so both
    # table reads stream sequentially; Kahan-compensated accumulation.
    cdef Py_ssize_t bit = <Py_ssize_t>1 << i
    cdef Py_ssize_t high, low, base_m, m
    cdef double d, wd
    cdef double v = 0.0, e2 = 0.0, cv = 0.0, ce = 0.0
    for high in range(total >> (i + 1)):
        base_m = high << (i + 1)
        for low in range(bit):
            m = base_m | low
            d = values[m | bit] - values[m]
            wd = wsize[__builtin_popcountll(<unsigned long long>m)] * d
            _kahan_add(wd, &v, &cv)
            _kahan_add(wd * d, &e2, &ce)
    out_v[0] = v
    out_e2[0] = e2


def tabular_moments(const double[::1] values, int n, const double[::1] wsize):
    """First and second weighted moments of every player's marginal contribution.

    ``wsize[s]`` is the probability of each individual size-``s`` coalition.
    Returns ``(v, e2)`` with ``v[i] = sum_S w(|S|) d_i(S)`` and
    ``e2[i] = sum_S w(|S|) d_i(S)**2`` over all ``S`` not containing ``i``.
    """
    v_arr = np.zeros(n)
    e_arr = np.zeros(n)
    cdef double[::1] v = v_arr, e2 = e_arr
    cdef Py_ssize_t total = values.shape[0]
    cdef int i
    with nogil:
        for i in range(n):
            _moments_for_player(&values[0], total, i, &wsize[0], &v[i], &e2[i])
    return v_arr, e_arr


def tabular_moments_one(const double[::1] values, int n, int i, const double[::1] wsize):
    """Single-player version of :func:`tabular_moments`."""
    cdef double v = 0.0, e2 = 0.0
    with nogil:
        _moments_for_player(&values[0], values.shape[0], i, &wsize[0], &v, &e2)
    return v, e2


def tabular_pair_moments(const double[::1] values_g, const double[::1] values_h,
                         int n, int i, const double[::1] wsize):
    """Cross moments of one player's marginals under two games.

    Returns ``(vg, vh, e_gh)`` where ``e_gh = sum_S w(|S|) d_iG(S) d_iH(S)``.
    """
    cdef Py_ssize_t total = values_g.shape[0]
    cdef Py_ssize_t bit = <Py_ssize_t>1 << i
    cdef Py_ssize_t high, low, base_m, m
    cdef double dg, dh, w
    cdef double vg = 0.0, vh = 0.0, egh = 0.0
    cdef double cg = 0.0, ch = 0.0, cgh = 0.0
    with nogil:
        for high in range(total >> (i + 1)):
            base_m = high << (i + 1)
            for low in range(bit):
                m = base_m | low
                w = wsize[__builtin_popcountll(<unsigned long long>m)]
                dg = values_g[m | bit] - values_g[m]
                dh = values_h[m | bit] - values_h[m]
                _kahan_add(w * dg, &vg, &cg)
                _kahan_add(w * dh, &vh, &ch)
                _kahan_add(w * dg * dh, &egh, &cgh)
    return vg, vh, egh


# ---------------------------------------------------------------------------
# permutation sampling


cdef inline void _shuffle_row(int64_t* perm, int n, const int64_t* row) noexcept nogil:
    cdef int t, j
    cdef int64_t k, tmp
    for t in range(n):
        perm[t] = t
    for t in range(n - 1):
        j = n - 1 - t
        k = row[t]
        tmp = perm[j]
        perm[j] = perm[k]
        perm[k] = tmp


def sample_marginals_tabular(const double[::1] values, int n, int i,
                             const int64_t[:, ::1] swaps):
    """Marginal of player ``i`` at its predecessor set, one per sampled ordering."""
    if n > 62:
        raise ValueError("mask sampling supports at most 62 players")
    cdef Py_ssize_t m = swaps.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    perm_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] perm = perm_arr
    cdef Py_ssize_t s
    cdef int idx
    cdef int64_t p
    cdef uint64_t mask, bit = <uint64_t>1 << i
    with nogil:
        for s in range(m):
            _shuffle_row(&perm[0], n, &swaps[s, 0] if n > 1 else NULL)
            mask = 0
            for idx in range(n):
                p = perm[idx]
                if p == i:
                    break
                mask |= <uint64_t>1 << p
            out[s] = values[mask | bit] - values[mask]
    return out_arr


def sample_marginals_symmetric(const double[::1] delta, int n, int i,
                               const int64_t[:, ::1] swaps):
    """Size-only games: the marginal is ``delta[position of i]``."""
    cdef Py_ssize_t m = swaps.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    perm_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] perm = perm_arr
    cdef Py_ssize_t s
    cdef int idx
    with nogil:
        for s in range(m):
            _shuffle_row(&perm[0], n, &swaps[s, 0] if n > 1 else NULL)
            for idx in range(n):
                if perm[idx] == i:
                    break
            out[s] = delta[idx]
    return out_arr


def sample_marginals_twotype(const double[:, ::1] worth, int n_a, int n_b, int i,
                             const int64_t[:, ::1] swaps):
    """Two-type games: marginal from the predecessor type counts."""
    cdef int n = n_a + n_b
    cdef Py_ssize_t m = swaps.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    perm_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] perm = perm_arr
    cdef Py_ssize_t s
    cdef int idx, a, b
    cdef int64_t p
    cdef bint is_a = i < n_a
    with nogil:
        for s in range(m):
            _shuffle_row(&perm[0], n, &swaps[s, 0] if n > 1 else NULL)
            a = 0
            b = 0
            for idx in range(n):
                p = perm[idx]
                if p == i:
                    break
                if p < n_a:
                    a += 1
                else:
                    b += 1
            if is_a:
                out[s] = worth[a + 1, b] - worth[a, b]
            else:
                out[s] = worth[a, b + 1] - worth[a, b]
    return out_arr


def sample_marginals_additive(const double[::1] weights, int n, int i,
                              const int64_t[:, ::1] swaps):
    """Additive games: difference of the two predecessor-set weight sums."""
    if n > 62:
        raise ValueError("mask sampling supports at most 62 players")
    cdef Py_ssize_t m = swaps.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    perm_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] perm = perm_arr
    cdef Py_ssize_t s
    cdef int idx
    cdef int64_t p
    cdef uint64_t mask
    cdef double acc_without, acc_with
    with nogil:
        for s in range(m):
            _shuffle_row(&perm[0], n, &swaps[s, 0] if n > 1 else NULL)
            mask = 0
            for idx in range(n):
                p = perm[idx]
                if p == i:
                    break
                mask |= <uint64_t>1 << p
            acc_without = 0.0
            acc_with = 0.0
            for idx in range(n):
                if mask & (<uint64_t>1 << idx):
                    acc_without += weights[idx]
                    acc_with += weights[idx]
                elif idx == i:
                    acc_with += weights[idx]
            out[s] = acc_with - acc_without
    return out_arr

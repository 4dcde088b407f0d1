"""Pure-numpy kernels: the fallback lane when the compiled extension is absent.

Every function here mirrors a function in ``_kernels`` (the Cython lane) with
the same signature and semantics. Moment sums use numpy's pairwise reduction,
the compiled lane uses compensated summation; the two agree to reduction-order
rounding, i.e. well inside 1e-12 relative on sane inputs.

Sampling kernels consume a pre-drawn swap matrix: ``swaps[s, t]`` is the
Fisher-Yates draw for step ``j = n-1-t`` of sample ``s``, an integer in
``[0, j]``. Consuming identical draws keeps the two lanes in lockstep.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BACKEND = "python"


@lru_cache(maxsize=8)
def _mask_tables(n: int):
    """(all masks, popcount per mask) below 2**n, cached per n."""
    popc = np.zeros(1, dtype=np.int8)
    for _ in range(n):
        popc = np.concatenate([popc, popc + 1])
    return np.arange(1 << n, dtype=np.int64), popc


def tabular_moments(values, n, wsize):
    """First and second weighted moments of every player's marginal contribution.

    ``wsize[s]`` is the probability of each individual size-``s`` coalition.
    Returns ``(v, e2)`` with ``v[i] = sum_S w(|S|) d_i(S)`` and
    ``e2[i] = sum_S w(|S|) d_i(S)**2`` over all ``S`` not containing ``i``.
    """
    masks, popc = _mask_tables(n)
    v = np.empty(n)
    e2 = np.empty(n)
    for i in range(n):
        bit = 1 << i
        sub = masks[(masks >> i) & 1 == 0]
        d = values[sub | bit] - values[sub]
        w = wsize[popc[sub]]
        v[i] = float(np.dot(w, d))
        e2[i] = float(np.dot(w * d, d))
    return v, e2


def tabular_moments_one(values, n, i, wsize):
    """Single-player version of :func:`tabular_moments`."""
    masks, popc = _mask_tables(n)
    bit = 1 << i
    sub = masks[(masks >> i) & 1 == 0]
    d = values[sub | bit] - values[sub]
    w = wsize[popc[sub]]
    return float(np.dot(w, d)), float(np.dot(w * d, d))


def tabular_pair_moments(values_g, values_h, n, i, wsize):
    """Cross moments of one player's marginals under two games.

    Returns ``(vg, vh, e_gh)`` where ``e_gh = sum_S w(|S|) d_iG(S) d_iH(S)``.
    """
    masks, popc = _mask_tables(n)
    bit = 1 << i
    sub = masks[(masks >> i) & 1 == 0]
    dg = values_g[sub | bit] - values_g[sub]
    dh = values_h[sub | bit] - values_h[sub]
    w = wsize[popc[sub]]
    return float(np.dot(w, dg)), float(np.dot(w, dh)), float(np.dot(w * dg, dh))


# ---------------------------------------------------------------------------
# permutation sampling


def _materialize_perms(n: int, swaps: np.ndarray) -> np.ndarray:
    """Apply the Fisher-Yates swap matrix, yielding one permutation per row."""
    m = swaps.shape[0]
    perm = np.tile(np.arange(n, dtype=np.int64), (m, 1))
    rows = np.arange(m)
    for t in range(n - 1):
        j = n - 1 - t
        k = swaps[:, t]
        pj = perm[rows, j].copy()
        perm[rows, j] = perm[rows, k]
        perm[rows, k] = pj
    return perm


def _positions(perm: np.ndarray, i: int) -> np.ndarray:
    return np.argmax(perm == i, axis=1)


def _pred_masks(perm: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Bit mask of the players preceding the tracked position, per row."""
    rows = np.arange(perm.shape[0])
    bits = np.left_shift(np.uint64(1), perm.astype(np.uint64))
    cum = np.cumsum(bits, axis=1)
    return np.where(pos > 0, cum[rows, pos - 1], np.uint64(0)).astype(np.int64)


def sample_marginals_tabular(values, n, i, swaps):
    """Marginal of player ``i`` at its predecessor set, one per sampled ordering."""
    perm = _materialize_perms(n, swaps)
    pred = _pred_masks(perm, _positions(perm, i))
    return values[pred | (1 << i)] - values[pred]


def sample_marginals_symmetric(delta, n, i, swaps):
    """Size-only games: the marginal is ``delta[position of i]``."""
    perm = _materialize_perms(n, swaps)
    return delta[_positions(perm, i)]


def sample_marginals_twotype(worth, n_a, n_b, i, swaps):
    """Two-type games: marginal from the predecessor type counts."""
    n = n_a + n_b
    perm = _materialize_perms(n, swaps)
    pos = _positions(perm, i)
    rows = np.arange(perm.shape[0])
    cum_a = np.cumsum(perm < n_a, axis=1)
    a = np.where(pos > 0, cum_a[rows, pos - 1], 0)
    b = pos - a
    if i < n_a:
        return worth[a + 1, b] - worth[a, b]
    return worth[a, b + 1] - worth[a, b]


def sample_marginals_additive(weights, n, i, swaps):
    """Additive games: difference of the two predecessor-set weight sums."""
    perm = _materialize_perms(n, swaps)
    pred = _pred_masks(perm, _positions(perm, i))
    cols = np.arange(n, dtype=np.int64)
    member = ((pred[:, None] >> cols) & 1).astype(np.float64)
    with_i = member.copy()
    with_i[:, i] = 1.0
    return with_i @ weights - member @ weights

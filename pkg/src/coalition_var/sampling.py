"""Monte Carlo estimation of marginal-contribution moments over random orderings.

One sample is one uniformly random ordering of the players; the observation
is the player's marginal contribution to its predecessor set. The sample
mean estimates the expected contribution and the Bessel-corrected sample
variance estimates its variance, both unbiasedly, because the predecessor
set of a uniform ordering has exactly the size-uniform coalition law.

Determinism contract: a report is a pure function of
``(game, player, n_samples, seed, n_chunks)``. Each chunk owns an
independent RNG stream spawned from the seed, draws swap matrices in fixed
blocks, and the per-chunk statistics are merged in a fixed pairwise order,
so the result does not depend on how chunks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from coalition_var._backend import kernels
from coalition_var.games import (
    AdditiveGame,
    Game,
    SymmetricGame,
    TabularGame,
    TwoTypeGame,
    to_tabular,
)
from coalition_var import exact

BLOCK = 1 << 14

Z95 = 1.96


class InsufficientSamples(ValueError):
    pass


@dataclass
class SampleStats:
    """Streaming count / mean / sum-of-squared-deviations accumulator."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @property
    def variance(self) -> float:
        """Bessel-corrected sample variance (0 for fewer than two samples)."""
        if self.count < 2:
            return 0.0
        return max(self.m2 / (self.count - 1), 0.0)

    @classmethod
    def from_array(cls, xs: np.ndarray) -> "SampleStats":
        if xs.size == 0:
            return cls()
        mean = float(xs.mean())
        dev = xs - mean
        return cls(int(xs.size), mean, float(np.dot(dev, dev)))

    def merge(self, other: "SampleStats") -> "SampleStats":
        """Combine two accumulators as if their samples were one stream."""
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return SampleStats(n, mean, m2)


def merge_pairwise(stats: list[SampleStats]) -> SampleStats:
    """Fixed-shape pairwise tree reduction over a list of accumulators."""
    if not stats:
        return SampleStats()
    while len(stats) > 1:
        nxt = [
            stats[k].merge(stats[k + 1]) if k + 1 < len(stats) else stats[k]
            for k in range(0, len(stats), 2)
        ]
        stats = nxt
    return stats[0]


@dataclass(frozen=True)
class EstimateReport:
    """Sampled moments with a normal-theory 95% interval for the mean."""

    player: int
    v_hat: float
    r_hat: float
    se_v: float
    ci95_v: tuple[float, float]
    n_samples: int
    seed: int


def _report(player: int, stats: SampleStats, seed: int) -> EstimateReport:
    r_hat = stats.variance
    se = math.sqrt(r_hat / stats.count)
    v = stats.mean
    return EstimateReport(
        player, v, r_hat, se, (v - Z95 * se, v + Z95 * se), stats.count, seed
    )


# ---------------------------------------------------------------------------
# randomness


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent counter-based stream for one chunk, derived from (seed, chunk)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def _draw_swaps(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """Fisher-Yates draw matrix: column t holds draws in [0, n-1-t]."""
    swaps = np.empty((m, max(n - 1, 0)), dtype=np.int64)
    for t in range(n - 1):
        swaps[:, t] = rng.integers(0, n - t, size=m, dtype=np.int64)
    return swaps


def sample_ordering(rng: np.random.Generator, n: int) -> np.ndarray:
    """One uniformly random ordering via an unbiased Fisher-Yates shuffle."""
    perm = np.arange(n, dtype=np.int64)
    for j in range(n - 1, 0, -1):
        k = int(rng.integers(0, j + 1))
        perm[j], perm[k] = perm[k], perm[j]
    return perm


# ---------------------------------------------------------------------------
# marginal blocks per game form


def _block_fn(game: Game, player: int):
    if isinstance(game, SymmetricGame):
        delta = np.ascontiguousarray(np.diff(game.size_worth))
        return lambda swaps: kernels.sample_marginals_symmetric(
            delta, game.n, player, swaps
        )
    if isinstance(game, TwoTypeGame):
        worth = np.ascontiguousarray(game.worth)
        return lambda swaps: kernels.sample_marginals_twotype(
            worth, game.n_a, game.n_b, player, swaps
        )
    if isinstance(game, AdditiveGame):
        weights = np.ascontiguousarray(game.weights)
        return lambda swaps: kernels.sample_marginals_additive(
            weights, game.n, player, swaps
        )
    values = np.ascontiguousarray(to_tabular(game).values)
    return lambda swaps: kernels.sample_marginals_tabular(
        values, game.n, player, swaps
    )


def _run_chunk(game_n: int, block, seed: int, chunk: int, size: int) -> SampleStats:
    rng = _chunk_rng(seed, chunk)
    stats = SampleStats()
    done = 0
    while done < size:
        m = min(BLOCK, size - done)
        d = block(_draw_swaps(rng, m, game_n))
        stats = stats.merge(SampleStats.from_array(d))
        done += m
    return stats


def estimate_parallel(
    game: Game,
    player: int,
    n_samples: int,
    seed: int,
    n_chunks: int = 1,
    max_workers: int | None = None,
) -> EstimateReport:
    """Chunked sampling estimate; bit-reproducible for fixed (seed, n_chunks).

    Chunk ``c`` draws from a stream spawned from ``(seed, c)``, so the split
    is statistically neutral; fixing ``n_chunks`` fixes the result regardless
    of ``max_workers`` or scheduling order.
    """
    if n_samples < 2:
        raise InsufficientSamples("need at least 2 samples for a variance")
    if n_chunks < 1:
        raise ValueError("n_chunks must be at least 1")
    seed = _check_seed(seed)
    game._check_player(player)
    block = _block_fn(game, player)
    base, extra = divmod(n_samples, n_chunks)
    sizes = [base + (1 if c < extra else 0) for c in range(n_chunks)]
    args = [(game.n, block, seed, c, sz) for c, sz in enumerate(sizes) if sz > 0]
    if max_workers and max_workers > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            chunk_stats = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        chunk_stats = [_run_chunk(*a) for a in args]
    return _report(player, merge_pairwise(chunk_stats), seed)


def estimate(game: Game, player: int, n_samples: int, seed: int) -> EstimateReport:
    """Single-stream sampling estimate (identical to one-chunk parallel)."""
    return estimate_parallel(game, player, n_samples, seed, n_chunks=1)


def estimate_all(game: Game, n_samples: int, seed: int) -> list[EstimateReport]:
    """Estimates for every player from one shared set of sampled orderings.

    Each ordering yields every player's marginal by telescoping, so this costs
    about one per-player run. The per-player moments stay unbiased, but the
    estimates are correlated across players (they share the orderings).
    """
    if n_samples < 2:
        raise InsufficientSamples("need at least 2 samples for a variance")
    seed = _check_seed(seed)
    n = game.n
    if isinstance(game, SymmetricGame):
        per_pos = np.diff(game.size_worth)
        lookup = "symmetric"
    elif isinstance(game, TwoTypeGame):
        worth = game.worth
        lookup = "twotype"
    else:
        values = to_tabular(game, limit=exact.exact_limit()).values
        lookup = "tabular"
    rng = _chunk_rng(seed, 0)
    stats = [SampleStats() for _ in range(n)]
    done = 0
    while done < n_samples:
        m = min(BLOCK, n_samples - done)
        swaps = _draw_swaps(rng, m, n)
        perm = _materialize_perms(n, swaps)
        if lookup == "symmetric":
            d_at_pos = np.broadcast_to(per_pos, (m, n))
        elif lookup == "twotype":
            cum_a = np.cumsum(perm < game.n_a, axis=1)
            a_before = np.hstack([np.zeros((m, 1), dtype=np.int64), cum_a[:, :-1]])
            b_before = np.arange(n)[None, :] - a_before
            is_a = perm < game.n_a
            # clamp the unused branch's indices into the table
            a_plus = np.minimum(a_before + 1, game.n_a)
            b_plus = np.minimum(b_before + 1, game.n_b)
            base = worth[a_before, b_before]
            d_at_pos = np.where(
                is_a, worth[a_plus, b_before] - base, worth[a_before, b_plus] - base
            )
        else:
            bits = np.left_shift(np.uint64(1), perm.astype(np.uint64))
            prefix = np.cumsum(bits, axis=1).astype(np.int64)
            prefix = np.hstack([np.zeros((m, 1), dtype=np.int64), prefix])
            worth_prefix = values[prefix]
            d_at_pos = np.diff(worth_prefix, axis=1)
        for i in range(n):
            di = np.ascontiguousarray(d_at_pos[perm == i])
            stats[i] = stats[i].merge(SampleStats.from_array(di))
        done += m
    return [_report(i, stats[i], seed) for i in range(n)]


def _materialize_perms(n: int, swaps: np.ndarray) -> np.ndarray:
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

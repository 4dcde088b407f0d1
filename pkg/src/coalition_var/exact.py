"""Exact expected value and variance of marginal contributions.

The generic path enumerates every coalition of a dense worth table. Games
whose worth depends only on coalition size (or on two type counts) get
closed-form fast paths that avoid the ``2**n`` table entirely:

* size-only games: under the size-uniform coalition law the predecessor-set
  size is uniform on ``0 .. n-1``, so the moments are plain averages of the
  size increments, in O(n);
* two-type games: given the predecessor-set size, the type split is
  hypergeometric over the remaining players, giving an O(n^2) mixture.

A separate full-permutation oracle recomputes the same moments by averaging
over every ordering of the players; it shares no code with the production
paths and exists to cross-check them.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from coalition_var._backend import kernels
from coalition_var.games import (
    AdditiveGame,
    Game,
    SymmetricGame,
    TabularGame,
    TwoTypeGame,
    TypeTag,
    to_tabular,
)
from coalition_var.weights import SHAPLEY, Weighting

DEFAULT_EXACT_LIMIT = 25
ORACLE_PLAYER_LIMIT = 10

# Variances more negative than this (relative to max(1, v^2)) cannot be
# explained by rounding in the one-pass accumulation.
_INSTABILITY_FLOOR = 1e-9


class GameTooLargeForExact(ValueError):
    pass


class TooManyPlayersForOracle(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class NumericalInstability(ArithmeticError):
    pass


def exact_limit() -> int:
    """Player cap for dense enumeration; COALITION_VAR_EXACT_LIMIT overrides."""
    raw = os.environ.get("COALITION_VAR_EXACT_LIMIT")
    return int(raw) if raw else DEFAULT_EXACT_LIMIT


@dataclass(frozen=True)
class PlayerProfile:
    """Expected marginal contribution ``v``, its variance ``r``, and ``sd = sqrt(r)``."""

    player: int
    v: float
    r: float
    sd: float


def _finalize(player: int, v: float, e2: float) -> PlayerProfile:
    r = e2 - v * v
    if r < 0.0:
        if r < -_INSTABILITY_FLOOR * max(1.0, v * v):
            raise NumericalInstability(
                f"variance {r!r} is too negative to be rounding noise"
            )
        r = 0.0
    return PlayerProfile(player, v, r, math.sqrt(r))


# ---------------------------------------------------------------------------
# fast paths


def _symmetric_moments(size_worth, n: int, weighting: Weighting) -> tuple[float, float]:
    delta = np.diff(np.asarray(size_worth, dtype=np.float64))
    if weighting.kind == "shapley":
        # predecessor size is exactly uniform: sum once, divide once
        return float(delta.sum() / n), float((delta * delta).sum() / n)
    probs = weighting.size_marginals(n)
    return float(np.dot(probs, delta)), float(np.dot(probs * delta, delta))


def symmetric_profile(n: int, size_worth) -> PlayerProfile:
    """Profile of any player of a size-only game, from its size-worth table."""
    g = np.asarray(size_worth, dtype=np.float64)
    if g.size != n + 1:
        raise ValueError(f"size table needs {n + 1} entries, got {g.size}")
    v, e2 = _symmetric_moments(g, n, SHAPLEY)
    return _finalize(0, v, e2)


def _hypergeom_weights(K: int, M: int, s: int) -> tuple[int, np.ndarray]:
    """Probabilities of drawing ``a`` type-A in ``s`` draws from K type-A, M type-B.

    Returns ``(a_min, probs)`` over the support ``a_min .. min(K, s)``. Built
    from the neighbour ratio anchored at the mode, so nothing overflows even
    for populations in the hundreds.
    """
    a_min = max(0, s - M)
    a_max = min(K, s)
    support = np.arange(a_min, a_max + 1, dtype=np.float64)
    w = np.empty(support.size)
    mode = min(max((s + 1) * (K + 1) // (K + M + 2), a_min), a_max)
    idx = mode - a_min
    w[idx] = 1.0
    if mode < a_max:
        a = support[idx:-1]
        up = (K - a) * (s - a) / ((a + 1.0) * (M - s + a + 1.0))
        w[idx + 1 :] = np.cumprod(up)
    if mode > a_min:
        a = support[1 : idx + 1]
        down = (a * (M - s + a)) / ((K - a + 1.0) * (s - a + 1.0))
        w[idx - 1 :: -1] = np.cumprod(down[::-1])
    return a_min, w / w.sum()


def _two_type_moments(
    n_a: int, n_b: int, worth, type_a_player: bool, weighting: Weighting
) -> tuple[float, float]:
    n = n_a + n_b
    worth = np.asarray(worth, dtype=np.float64)
    if type_a_player:
        K, M = n_a - 1, n_b
    else:
        K, M = n_a, n_b - 1
    shapley = weighting.kind == "shapley"
    size_probs = None if shapley else weighting.size_marginals(n)
    v = 0.0
    e2 = 0.0
    for s in range(n):
        a_min, w = _hypergeom_weights(K, M, s)
        a = np.arange(a_min, a_min + w.size)
        b = s - a
        if type_a_player:
            d = worth[a + 1, b] - worth[a, b]
        else:
            d = worth[a, b + 1] - worth[a, b]
        p = 1.0 if shapley else size_probs[s]
        v += p * float(np.dot(w, d))
        e2 += p * float(np.dot(w * d, d))
    if shapley:
        v /= n
        e2 /= n
    return v, e2


def two_type_profile(n_a: int, n_b: int, worth, player_type: TypeTag) -> PlayerProfile:
    """Profile of any player of the given type in a two-type game."""
    if player_type is TypeTag.A and n_a < 1:
        raise ValueError("no type-A players in this game")
    if player_type is TypeTag.B and n_b < 1:
        raise ValueError("no type-B players in this game")
    v, e2 = _two_type_moments(n_a, n_b, worth, player_type is TypeTag.A, SHAPLEY)
    player = 0 if player_type is TypeTag.A else n_a
    return _finalize(player, v, e2)


# ---------------------------------------------------------------------------
# generic dense path


def _dense_values(game: Game, limit: int) -> np.ndarray:
    if game.n > limit:
        raise GameTooLargeForExact(
            f"{game.n} players exceeds the exact enumeration limit of {limit}; "
            "use the sampling estimator instead"
        )
    return to_tabular(game, limit=limit).values


def _values_moments(values: np.ndarray, n: int, weighting: Weighting):
    wsize = np.ascontiguousarray(weighting.per_size(n))
    return kernels.tabular_moments(np.ascontiguousarray(values), n, wsize)


def profiles_from_values(values, n: int, weighting: Weighting = SHAPLEY):
    """All players' profiles straight from a dense worth table."""
    v, e2 = _values_moments(np.asarray(values, dtype=np.float64), n, weighting)
    return [_finalize(i, float(v[i]), float(e2[i])) for i in range(n)]


def profile(
    game: Game,
    player: int,
    weighting: Weighting = SHAPLEY,
    limit: int | None = None,
) -> PlayerProfile:
    """Expected marginal contribution and its variance for one player."""
    game._check_player(player)
    if isinstance(game, SymmetricGame):
        v, e2 = _symmetric_moments(game.size_worth, game.n, weighting)
        return _finalize(player, v, e2)
    if isinstance(game, TwoTypeGame):
        is_a = game.player_type(player) is TypeTag.A
        v, e2 = _two_type_moments(game.n_a, game.n_b, game.worth, is_a, weighting)
        return _finalize(player, v, e2)
    values = _dense_values(game, exact_limit() if limit is None else limit)
    wsize = np.ascontiguousarray(weighting.per_size(game.n))
    v, e2 = kernels.tabular_moments_one(values, game.n, player, wsize)
    return _finalize(player, v, e2)


def all_profiles(
    game: Game,
    weighting: Weighting = SHAPLEY,
    limit: int | None = None,
) -> list[PlayerProfile]:
    """Profiles for every player, in one enumeration pass where possible."""
    if isinstance(game, SymmetricGame):
        v, e2 = _symmetric_moments(game.size_worth, game.n, weighting)
        ref = _finalize(0, v, e2)
        return [PlayerProfile(i, ref.v, ref.r, ref.sd) for i in range(game.n)]
    if isinstance(game, TwoTypeGame):
        out = []
        for is_a, count in ((True, game.n_a), (False, game.n_b)):
            if count == 0:
                continue
            v, e2 = _two_type_moments(game.n_a, game.n_b, game.worth, is_a, weighting)
            ref = _finalize(0, v, e2)
            start = 0 if is_a else game.n_a
            out.extend(
                PlayerProfile(i, ref.v, ref.r, ref.sd)
                for i in range(start, start + count)
            )
        return out
    values = _dense_values(game, exact_limit() if limit is None else limit)
    return profiles_from_values(values, game.n, weighting)


def average_uncertainty(profiles) -> float:
    """Arithmetic mean of the players' variances."""
    profiles = list(profiles)
    if not profiles:
        raise EmptyInput("no profiles to average")
    return math.fsum(p.r for p in profiles) / len(profiles)


def marginal_covariance(
    g: Game, h: Game, player: int, weighting: Weighting = SHAPLEY
) -> float:
    """Covariance of one player's marginals under two games, same coalition law.

    Satisfies ``r(G+H) = r(G) + r(H) + 2 * cov`` exactly up to rounding.
    """
    if g.n != h.n:
        raise ValueError(f"games have {g.n} and {h.n} players")
    lim = exact_limit()
    vg_tab = _dense_values(g, lim)
    vh_tab = _dense_values(h, lim)
    wsize = np.ascontiguousarray(weighting.per_size(g.n))
    vg, vh, egh = kernels.tabular_pair_moments(vg_tab, vh_tab, g.n, player, wsize)
    return egh - vg * vh


# ---------------------------------------------------------------------------
# full-permutation oracle (independent check path)


def ordering_marginal_sum(game: Game, ordering) -> float:
    """Sum of all players' marginals along one ordering; telescopes to the grand worth."""
    perm = list(ordering)
    if sorted(perm) != list(range(game.n)):
        raise ValueError(f"{perm} is not a permutation of 0..{game.n - 1}")
    mask = 0
    terms = []
    for p in perm:
        terms.append(game.marginal(p, mask))
        mask |= 1 << p
    return math.fsum(terms)


def permutation_oracle(game: Game, player: int, batch: int = 120_000) -> PlayerProfile:
    """Moments of the player's marginal over *all* orderings, enumerated outright.

    Independent of the weighted-subset production path; intended as its
    cross-check. Limited to 10 players (10! orderings).
    """
    n = game.n
    if n > ORACLE_PLAYER_LIMIT:
        raise TooManyPlayersForOracle(f"{n}! orderings is too many to enumerate")
    game._check_player(player)
    vals = to_tabular(game, limit=ORACLE_PLAYER_LIMIT).values
    bit = 1 << player
    total = math.factorial(n)
    sums = []
    sq_sums = []
    perms_iter = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(perms_iter, batch))
        if not chunk:
            break
        perm = np.array(chunk, dtype=np.int64)
        rows = np.arange(perm.shape[0])
        pos = np.argmax(perm == player, axis=1)
        bits = np.left_shift(np.uint64(1), perm.astype(np.uint64))
        cum = np.cumsum(bits, axis=1)
        pred = np.where(pos > 0, cum[rows, pos - 1], np.uint64(0)).astype(np.int64)
        d = vals[pred | bit] - vals[pred]
        sums.append(float(d.sum()))
        sq_sums.append(float(np.dot(d, d)))
    v = math.fsum(sums) / total
    e2 = math.fsum(sq_sums) / total
    return _finalize(player, v, e2)

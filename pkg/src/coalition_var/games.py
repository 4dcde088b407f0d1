"""Players, coalitions, characteristic functions, and game algebra.

A coalition is a bit mask: bit ``i`` set means player ``i`` is a member.
Plain Python integers keep masks exact for any player count; the dense
tabular form is capped at 62 players so masks also fit an unsigned 64-bit
word in the compiled kernels.

Four game forms are supported:

* ``TabularGame`` -- an explicit worth for every one of the ``2**n`` coalitions.
* ``AdditiveGame`` -- worth of a coalition is the sum of its members' weights.
* ``SymmetricGame`` -- worth depends only on coalition size.
* ``TwoTypeGame``  -- worth depends only on how many members of each of two
  player types the coalition contains (the first ``n_a`` players are type A).

All games are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

MASK_PLAYER_LIMIT = 62

# Pointwise add/mix of games with no shared closed form expands to a tabular
# table; past this size the table would not fit in memory.
TABULAR_EXPAND_LIMIT = 22


class GameError(ValueError):
    """Base class for game construction and query errors."""


class MissingCoalition(GameError):
    pass


class TooManyPlayers(GameError):
    pass


class PlayerInCoalition(GameError):
    pass


class PlayerCountMismatch(GameError):
    pass


class LengthMismatch(GameError):
    pass


class TableShapeMismatch(GameError):
    pass


class NotSymmetric(GameError):
    pass


class TooLargeForExactCheck(GameError):
    pass


class TypeTag(Enum):
    A = "A"
    B = "B"


def mask_of(members: Iterable[int], n: int) -> int:
    """Encode a collection of player indices as a coalition mask."""
    mask = 0
    for p in members:
        if not 0 <= p < n:
            raise GameError(f"player index {p} out of range for {n} players")
        bit = 1 << p
        if mask & bit:
            raise GameError(f"duplicate player {p} in coalition")
        mask |= bit
    return mask


def members_of(mask: int) -> tuple[int, ...]:
    """Decode a coalition mask into a sorted tuple of player indices."""
    out = []
    p = 0
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return tuple(out)


def _as_readonly(arr, dtype=np.float64):
    a = np.ascontiguousarray(arr, dtype=dtype)
    a.setflags(write=False)
    return a


class Game:
    """A transferable-utility game over ``n`` players.

    Subclasses implement :meth:`value`; everything else is shared. The empty
    coalition is worth 0 unless a tabular game explicitly overrides it.
    """

    n: int

    def value(self, coalition: int) -> float:
        raise NotImplementedError

    def marginal(self, player: int, coalition: int) -> float:
        """Worth increment ``G(S + i) - G(S)`` from ``player`` joining ``coalition``.

        Computed as the literal difference of the two :meth:`value` calls, in
        that order, so the arithmetic path is identical everywhere.
        """
        if coalition >> player & 1:
            raise PlayerInCoalition(f"player {player} already in coalition")
        return self.value(coalition | (1 << player)) - self.value(coalition)

    def grand_coalition(self) -> int:
        return (1 << self.n) - 1

    def _check_player(self, player: int) -> None:
        if not 0 <= player < self.n:
            raise GameError(f"player index {player} out of range for {self.n} players")


class TabularGame(Game):
    """Explicit worth table indexed by coalition mask."""

    def __init__(self, values: np.ndarray):
        values = _as_readonly(values)
        n = int(values.size).bit_length() - 1
        if values.size != 1 << n or n < 1:
            raise GameError(f"table length {values.size} is not 2**n for n >= 1")
        if n > MASK_PLAYER_LIMIT:
            raise TooManyPlayers(f"tabular form supports at most {MASK_PLAYER_LIMIT} players")
        self.n = n
        self.values = values

    def value(self, coalition: int) -> float:
        return float(self.values[coalition])


class AdditiveGame(Game):
    """Worth of a coalition is the sum of its members' individual weights."""

    def __init__(self, weights):
        w = _as_readonly(weights)
        if w.ndim != 1 or w.size < 1:
            raise GameError("weights must be a non-empty 1-d array")
        self.n = int(w.size)
        self.weights = w

    def value(self, coalition: int) -> float:
        if coalition == 0:
            return 0.0
        return float(self.weights[list(members_of(coalition))].sum())


class SymmetricGame(Game):
    """Worth depends only on coalition size: ``value(S) = size_worth[|S|]``."""

    def __init__(self, n: int, size_worth):
        g = _as_readonly(size_worth)
        if n < 1:
            raise GameError("need at least one player")
        if g.size != n + 1:
            raise LengthMismatch(f"size table needs {n + 1} entries, got {g.size}")
        self.n = n
        self.size_worth = g

    def value(self, coalition: int) -> float:
        return float(self.size_worth[coalition.bit_count()])


class TwoTypeGame(Game):
    """Worth depends only on the member counts of two player types.

    Players ``0 .. n_a-1`` are type A, the rest type B. ``worth[a, b]`` is the
    value of any coalition with ``a`` type-A and ``b`` type-B members.
    """

    def __init__(self, n_a: int, n_b: int, worth):
        if n_a < 0 or n_b < 0 or n_a + n_b < 1:
            raise GameError("need n_a, n_b >= 0 and at least one player")
        w = _as_readonly(worth)
        if w.shape != (n_a + 1, n_b + 1):
            raise TableShapeMismatch(
                f"worth table must be shape ({n_a + 1}, {n_b + 1}), got {w.shape}"
            )
        self.n = n_a + n_b
        self.n_a = n_a
        self.n_b = n_b
        self.worth = w
        self._a_mask = (1 << n_a) - 1

    def player_type(self, player: int) -> TypeTag:
        self._check_player(player)
        return TypeTag.A if player < self.n_a else TypeTag.B

    def type_counts(self, coalition: int) -> tuple[int, int]:
        a = (coalition & self._a_mask).bit_count()
        return a, coalition.bit_count() - a

    def value(self, coalition: int) -> float:
        a, b = self.type_counts(coalition)
        return float(self.worth[a, b])


# ---------------------------------------------------------------------------
# generators


def make_tabular(n: int, values: Mapping) -> TabularGame:
    """Build a tabular game from a coalition -> worth mapping.

    Keys may be integer masks or iterables of player indices. Every non-empty
    coalition must appear exactly once; the empty coalition defaults to 0 but
    an explicit entry overrides that.
    """
    if n < 1:
        raise GameError("need at least one player")
    if n > MASK_PLAYER_LIMIT:
        raise TooManyPlayers(f"tabular form supports at most {MASK_PLAYER_LIMIT} players")
    table = np.zeros(1 << n)
    seen = np.zeros(1 << n, dtype=bool)
    for key, val in values.items():
        mask = key if isinstance(key, int) else mask_of(key, n)
        if not 0 <= mask < (1 << n):
            raise GameError(f"coalition {key!r} out of range for {n} players")
        if seen[mask]:
            raise GameError(f"coalition {members_of(mask)} given twice")
        seen[mask] = True
        table[mask] = float(val)
    missing = np.flatnonzero(~seen)
    missing = missing[missing != 0]  # empty coalition is optional
    if missing.size:
        raise MissingCoalition(f"no value for coalition {members_of(int(missing[0]))}")
    return TabularGame(table)


def generate_additive(weights) -> AdditiveGame:
    return AdditiveGame(weights)


def generate_majority(n: int) -> SymmetricGame:
    """Majority game: a coalition is worth ``n`` once it exceeds half the players."""
    if n < 1:
        raise GameError("need at least one player")
    sizes = np.arange(n + 1)
    return SymmetricGame(n, np.where(sizes > n / 2, float(n), 0.0))


def generate_symmetric(n: int, size_worth) -> SymmetricGame:
    return SymmetricGame(n, size_worth)


def sqrt_product_worth(n_a: int, n_b: int) -> np.ndarray:
    """Worth table ``sqrt(a*b)``: the two-input production / market economy."""
    a = np.arange(n_a + 1, dtype=np.float64)[:, None]
    b = np.arange(n_b + 1, dtype=np.float64)[None, :]
    return np.sqrt(a * b)


def generate_two_type(n_a: int, n_b: int, worth) -> TwoTypeGame:
    """Two-type game from a ``(n_a+1, n_b+1)`` worth table or ``worth(a, b)`` callable."""
    if callable(worth):
        table = np.empty((n_a + 1, n_b + 1))
        for a in range(n_a + 1):
            for b in range(n_b + 1):
                table[a, b] = worth(a, b)
        worth = table
    return TwoTypeGame(n_a, n_b, worth)


# ---------------------------------------------------------------------------
# algebra


def to_tabular(game: Game, limit: int = TABULAR_EXPAND_LIMIT) -> TabularGame:
    """Expand any game form into an explicit table (``n <= limit``)."""
    if isinstance(game, TabularGame):
        return game
    if game.n > limit:
        raise TooManyPlayers(f"refusing to expand {game.n} players to 2**{game.n} entries")
    masks = np.arange(1 << game.n, dtype=np.uint64)
    sizes = _popcounts(game.n)
    if isinstance(game, SymmetricGame):
        return TabularGame(game.size_worth[sizes])
    if isinstance(game, TwoTypeGame):
        a = _popcounts_masked(game.n, game._a_mask)
        return TabularGame(game.worth[a, sizes - a])
    if isinstance(game, AdditiveGame):
        table = np.zeros(1 << game.n)
        for p in range(game.n):
            table[(masks >> np.uint64(p)) & np.uint64(1) == 1] += game.weights[p]
        return TabularGame(table)
    table = np.fromiter((game.value(m) for m in range(1 << game.n)), dtype=np.float64)
    return TabularGame(table)


def _popcounts(n: int) -> np.ndarray:
    """Popcount of every mask below 2**n (doubling construction)."""
    p = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        p = np.concatenate([p, p + 1])
    return p


def _popcounts_masked(n: int, mask: int) -> np.ndarray:
    """Popcount of ``m & mask`` for every mask below 2**n."""
    p = np.zeros(1, dtype=np.int64)
    for b in range(n):
        p = np.concatenate([p, p + (mask >> b & 1)])
    return p


def scale_game(game: Game, t: float) -> Game:
    """Pointwise ``t * G``, preserving the game's closed form."""
    t = float(t)
    if isinstance(game, TabularGame):
        return TabularGame(game.values * t)
    if isinstance(game, AdditiveGame):
        return AdditiveGame(game.weights * t)
    if isinstance(game, SymmetricGame):
        return SymmetricGame(game.n, game.size_worth * t)
    if isinstance(game, TwoTypeGame):
        return TwoTypeGame(game.n_a, game.n_b, game.worth * t)
    raise GameError(f"unknown game form {type(game).__name__}")


def add_games(g: Game, h: Game) -> Game:
    """Pointwise ``G + H``; keeps a shared closed form, otherwise goes tabular."""
    if g.n != h.n:
        raise PlayerCountMismatch(f"games have {g.n} and {h.n} players")
    if isinstance(g, AdditiveGame) and isinstance(h, AdditiveGame):
        return AdditiveGame(g.weights + h.weights)
    if isinstance(g, SymmetricGame) and isinstance(h, SymmetricGame):
        return SymmetricGame(g.n, g.size_worth + h.size_worth)
    if (
        isinstance(g, TwoTypeGame)
        and isinstance(h, TwoTypeGame)
        and (g.n_a, g.n_b) == (h.n_a, h.n_b)
    ):
        return TwoTypeGame(g.n_a, g.n_b, g.worth + h.worth)
    return TabularGame(to_tabular(g).values + to_tabular(h).values)


def mix_games(g: Game, h: Game, alpha: float) -> Game:
    """Pointwise convex combination ``alpha*G + (1-alpha)*H``."""
    if not 0.0 <= alpha <= 1.0:
        raise GameError(f"alpha must lie in [0, 1], got {alpha}")
    return add_games(scale_game(g, alpha), scale_game(h, 1.0 - alpha))


# ---------------------------------------------------------------------------
# structural predicates


def is_superadditive(game: Game, rel_tol: float = 1e-12) -> bool:
    """True iff ``G(S | T) >= G(S) + G(T)`` for every disjoint pair ``S, T``.

    The check walks all ``3**n`` disjoint pairs, so it is limited to small
    games. ``rel_tol`` absorbs the reassociation rounding that makes e.g. an
    additive game's equality inexact in floats.
    """
    if game.n > 16:
        raise TooLargeForExactCheck(f"3**{game.n} disjoint pairs is too many")
    full = (1 << game.n) - 1
    vals = to_tabular(game, limit=16).values
    slack = rel_tol * max(1.0, float(np.abs(vals).max()))
    for s in range(1, full + 1):
        vs = vals[s]
        rest = full & ~s
        t = rest
        while t:
            if vals[s | t] < vs + vals[t] - slack:
                return False
            t = (t - 1) & rest
    return True


def size_profile(game: Game, rel_tol: float = 1e-12) -> np.ndarray:
    """Worth-by-size table of a symmetric game; ``NotSymmetric`` otherwise."""
    if isinstance(game, SymmetricGame):
        return np.asarray(game.size_worth)
    if isinstance(game, AdditiveGame):
        if np.ptp(game.weights) > rel_tol * max(1.0, float(np.abs(game.weights).max())):
            raise NotSymmetric("additive game with unequal weights")
        return float(game.weights[0]) * np.arange(game.n + 1, dtype=np.float64)
    if isinstance(game, TwoTypeGame):
        g = np.empty(game.n + 1)
        for s in range(game.n + 1):
            cells = [
                game.worth[a, s - a]
                for a in range(max(0, s - game.n_b), min(game.n_a, s) + 1)
            ]
            g[s] = cells[0]
            if max(cells) - min(cells) > rel_tol * max(1.0, abs(cells[0])):
                raise NotSymmetric(f"worth differs across compositions of size {s}")
        return g
    if isinstance(game, TabularGame):
        sizes = _popcounts(game.n)
        g = np.empty(game.n + 1)
        for s in range(game.n + 1):
            vals = game.values[sizes == s]
            g[s] = vals[0]
            if np.ptp(vals) > rel_tol * max(1.0, float(np.abs(vals).max())):
                raise NotSymmetric(f"coalitions of size {s} have unequal worth")
        return g
    raise GameError(f"unknown game form {type(game).__name__}")


def is_symmetric_convex(game: Game) -> bool:
    """True iff the game is symmetric with nondecreasing, convex size worth.

    Raises ``NotSymmetric`` when worth is not a function of coalition size.
    """
    g = size_profile(game)
    diffs = np.diff(g)
    return bool(np.all(diffs >= 0) and np.all(np.diff(diffs) >= 0))

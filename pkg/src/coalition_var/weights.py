"""Coalition weightings for probabilistic values.

A weighting assigns each coalition ``S`` not containing player ``i`` the
probability that ``i`` joins exactly ``S``. All supported weightings depend
on ``S`` only through its size:

* Shapley:  ``p(s) = s! (n-s-1)! / n!``
* Banzhaf:  ``p(s) = 2**-(n-1)``  (uniform over subsets)
* Custom:   any size-indexed density normalised over the ``2**(n-1)`` subsets
"""

from __future__ import annotations

import math

import numpy as np


class OutOfRange(ValueError):
    pass


def shapley_weight(s: int, n: int) -> float:
    """Probability of one particular size-``s`` coalition, ``s!(n-s-1)!/n!``.

    Evaluated by a multiplicative recurrence so no factorial overflows.
    """
    if n < 1 or not 0 <= s <= n - 1:
        raise OutOfRange(f"need 0 <= s <= n-1, got s={s}, n={n}")
    w = 1.0 / n
    for k in range(s):
        w *= (k + 1) / (n - k - 1)
    return w


def banzhaf_weight(n: int) -> float:
    """Uniform subset probability ``2**-(n-1)``."""
    if n < 1:
        raise OutOfRange(f"need n >= 1, got {n}")
    return math.ldexp(1.0, -(n - 1))


def shapley_size_weights(n: int) -> np.ndarray:
    """Per-coalition Shapley weight for each size ``0 .. n-1``."""
    w = np.empty(n)
    w[0] = 1.0 / n
    for s in range(n - 1):
        w[s + 1] = w[s] * (s + 1) / (n - s - 1)
    return w


def _size_counts(n: int) -> np.ndarray:
    """Binomial coefficients C(n-1, s) for s = 0 .. n-1, by recurrence."""
    c = np.empty(n)
    c[0] = 1.0
    for s in range(n - 1):
        c[s + 1] = c[s] * (n - 1 - s) / (s + 1)
    return c


class Weighting:
    """A size-dependent coalition distribution. Use the class constructors."""

    def __init__(self, kind: str, density=None, n: int | None = None):
        self.kind = kind
        self._density = density
        self._n = n

    @classmethod
    def shapley(cls) -> "Weighting":
        return cls("shapley")

    @classmethod
    def banzhaf(cls) -> "Weighting":
        return cls("banzhaf")

    @classmethod
    def custom(cls, density, rel_tol: float = 1e-9) -> "Weighting":
        """Weighting from an explicit per-size density for a fixed player count.

        ``density[s]`` is the probability of each individual size-``s``
        coalition; there must be ``n`` entries for an ``n``-player game and the
        total mass over all ``2**(n-1)`` subsets must be 1.
        """
        d = np.ascontiguousarray(density, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise OutOfRange("density must be a non-empty 1-d array")
        if np.any(d < 0):
            raise OutOfRange("density entries must be non-negative")
        n = int(d.size)
        total = float(np.dot(_size_counts(n), d))
        if abs(total - 1.0) > rel_tol:
            raise OutOfRange(f"density mass over all subsets is {total!r}, expected 1")
        return cls("custom", density=d, n=n)

    def per_size(self, n: int) -> np.ndarray:
        """Per-coalition weight indexed by size, for an ``n``-player game."""
        if self.kind == "shapley":
            return shapley_size_weights(n)
        if self.kind == "banzhaf":
            return np.full(n, banzhaf_weight(n))
        if self._n != n:
            raise OutOfRange(f"custom weighting is for {self._n} players, game has {n}")
        return self._density

    def size_marginals(self, n: int) -> np.ndarray:
        """Probability that the coalition has size ``s``: ``C(n-1,s) * p(s)``."""
        return _size_counts(n) * self.per_size(n)

    def __repr__(self):
        return f"Weighting({self.kind!r})"


SHAPLEY = Weighting.shapley()
BANZHAF = Weighting.banzhaf()

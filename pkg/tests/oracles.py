"""Independent brute-force references used only by the tests.

Everything here deliberately avoids the library's enumeration/kernel code:
weights come from exact rational factorials, subsets from
``itertools.combinations``, orderings from ``itertools.permutations``, and
accumulation from ``math.fsum``.
"""

import itertools
import math
from fractions import Fraction


def exact_shapley_weight(s: int, n: int) -> Fraction:
    return Fraction(
        math.factorial(s) * math.factorial(n - s - 1), math.factorial(n)
    )


def brute_profile(value, n, i, weighting="shapley"):
    """(mean, variance) of player i's marginal over subsets of the others.

    ``value`` maps a frozenset of player indices to a float.
    """
    others = [p for p in range(n) if p != i]
    terms_v = []
    terms_e2 = []
    for size in range(n):
        if weighting == "shapley":
            w = float(exact_shapley_weight(size, n))
        else:
            w = 0.5 ** (n - 1)
        for combo in itertools.combinations(others, size):
            s = frozenset(combo)
            d = value(s | {i}) - value(s)
            terms_v.append(w * d)
            terms_e2.append(w * d * d)
    v = math.fsum(terms_v)
    return v, math.fsum(terms_e2) - v * v


def brute_profile_orderings(value, n, i):
    """(mean, variance) of player i's marginal over all n! orderings."""
    ds = []
    for perm in itertools.permutations(range(n)):
        pred = frozenset(perm[: perm.index(i)])
        ds.append(value(pred | {i}) - value(pred))
    v = math.fsum(ds) / len(ds)
    e2 = math.fsum(d * d for d in ds) / len(ds)
    return v, e2 - v * v


def table_value_fn(values_by_mask, n):
    """Adapt a mask-indexed table to the frozenset convention used here."""

    def value(players: frozenset) -> float:
        mask = 0
        for p in players:
            mask |= 1 << p
        return float(values_by_mask[mask])

    return value

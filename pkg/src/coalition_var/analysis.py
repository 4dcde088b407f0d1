"""Interpretation formulas, significance testing, property suites, and sweeps.

* payoff-mixture variance, a Chebyshev tail bound, and a normal 95% band
  that translate a variance into statements about realized payoffs;
* a z-test table for attribution studies (``z = |v| / sqrt(r)``);
* randomized suites that machine-check the proven properties of the
  variance measure (scaling, dummy, symmetry, bounds, convexity, ...);
* an empirical probe of the open lower-bound conjecture for sums of
  superadditive games;
* exact large-``n`` sweeps of the majority and two-type economy families
  with their theory-scaled columns and trend diagnostics.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from coalition_var import exact
from coalition_var.games import (
    SymmetricGame,
    generate_majority,
    sqrt_product_worth,
)
from coalition_var.weights import SHAPLEY

Z_CRIT_DEFAULT = 1.96
BORDERLINE_WIDTH = 0.05

SUITE_TOLERANCE = 1e-9


class NegativeVariance(ValueError):
    pass


class ZeroValue(ValueError):
    pass


class NegativeUncertainty(ValueError):
    pass


class DegenerateDenominators(ValueError):
    pass


class SizeNotRepresentable(ValueError):
    pass


# ---------------------------------------------------------------------------
# payoff mixture (bargaining weight alpha on the random marginal)


@dataclass(frozen=True)
class MixtureParams:
    """Weight of the random marginal in the realized payoff, in [0, 1]."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def mixture_variance(p: MixtureParams, r: float) -> float:
    """Variance of the mixed payoff: ``alpha**2 * r``."""
    if r < 0:
        raise NegativeVariance(f"r must be non-negative, got {r}")
    return p.alpha * p.alpha * r


def chebyshev_bound(p: MixtureParams, v: float, r: float, c: float) -> float:
    """Bound on ``Pr{ |payoff/v - 1| >= c }``: ``min(1, alpha^2 r / (c^2 v^2))``."""
    if v == 0:
        raise ZeroValue("relative deviation is undefined for a zero value")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if r < 0:
        raise NegativeVariance(f"r must be non-negative, got {r}")
    return min(1.0, p.alpha * p.alpha * r / (c * c * v * v))


def normal_deviation_band(p: MixtureParams, r: float) -> float:
    """Half-width ``1.96 * alpha * sqrt(r)`` of the normal-theory 95% band."""
    if r < 0:
        raise NegativeVariance(f"r must be non-negative, got {r}")
    return Z_CRIT_DEFAULT * p.alpha * math.sqrt(r)


# ---------------------------------------------------------------------------
# significance table


@dataclass(frozen=True)
class SignificanceRow:
    label: str
    v: float
    sd: float
    z: float
    significant_5pct: bool


def significance_table(rows, z_crit: float = Z_CRIT_DEFAULT) -> list[SignificanceRow]:
    """Two-sided z-test per (label, v, r) row: significant iff ``|v|/sqrt(r) > z_crit``.

    A zero variance gives ``z = inf`` for a nonzero value and ``z = 0``
    otherwise, keeping the column NaN-free.
    """
    out = []
    for label, v, r in rows:
        if r < 0:
            raise NegativeUncertainty(f"{label}: r must be non-negative, got {r}")
        sd = math.sqrt(r)
        if sd > 0:
            z = abs(v) / sd
        else:
            z = math.inf if v != 0 else 0.0
        out.append(SignificanceRow(label, v, sd, z, z > z_crit))
    return out


def is_borderline(z: float, z_crit: float = Z_CRIT_DEFAULT) -> bool:
    """True when a z statistic sits within 0.05 of the threshold."""
    return math.isfinite(z) and abs(z - z_crit) < BORDERLINE_WIDTH


# ---------------------------------------------------------------------------
# property suites


PROPERTIES = (
    "scaling",
    "dummy",
    "symmetry",
    "strong-symmetry",
    "variance-sum-bound",
    "convexity",
    "corollary-sum",
    "symmetric-convex-superadd",
    "monotone-covariance-lemma",
    "efficiency-per-ordering",
)


@dataclass(frozen=True)
class Violation:
    fingerprint: str
    player: int
    lhs: float
    rhs: float
    gap: float
    witness: dict = field(default=None, repr=False)


@dataclass
class PropertyReport:
    name: str
    instances: int
    violations: list
    max_gap: float
    tolerance: float = SUITE_TOLERANCE

    @property
    def passed(self) -> bool:
        return not self.violations


def _fingerprint(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:12]


def _tol(lhs: float, rhs: float) -> float:
    # absolute tolerance on unit-scale games, relative beyond
    return SUITE_TOLERANCE * max(1.0, abs(lhs), abs(rhs))


def _rand_values(rng, n: int) -> np.ndarray:
    vals = rng.uniform(-1.0, 1.0, 1 << n)
    vals[0] = 0.0
    return vals


def _vr(values, n):
    profs = exact.profiles_from_values(values, n, SHAPLEY)
    return np.array([p.v for p in profs]), np.array([p.r for p in profs])


class _Recorder:
    def __init__(self, name):
        self.name = name
        self.violations = []
        self.max_gap = 0.0
        self._fp = ""
        self._witness = ()

    def context(self, fp, *witness_arrays):
        """Set the instance fingerprint and witness payload for later checks."""
        self._fp = fp
        self._witness = witness_arrays

    def check(self, player, lhs, rhs, gap):
        """Record (lhs, rhs); a positive gap beyond tolerance is a violation."""
        if gap > self.max_gap:
            self.max_gap = gap
        if gap > _tol(lhs, rhs):
            witness = {
                f"witness_{k}": np.asarray(a).tolist()
                for k, a in enumerate(self._witness)
            }
            self.violations.append(
                Violation(self._fp, player, lhs, rhs, gap, witness)
            )

    def report(self, instances) -> PropertyReport:
        return PropertyReport(self.name, instances, self.violations, self.max_gap)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def _suite_scaling(rec, rng, n):
    vals = _rand_values(rng, n)
    t = float(rng.uniform(-10.0, 10.0))
    v, r = _vr(vals, n)
    vt, rt = _vr(vals * t, n)
    rec.context(_fingerprint(vals, [t]), vals, [t])
    for i in range(n):
        rec.check(i, vt[i], t * v[i], abs(vt[i] - t * v[i]))
        rec.check(i, rt[i], t * t * r[i], abs(rt[i] - t * t * r[i]))


def _suite_dummy(rec, rng, n):
    # last player contributes a constant c to every coalition it joins
    base = _rand_values(rng, n - 1)
    c = float(rng.uniform(-1.0, 1.0))
    vals = np.concatenate([base, base + c])
    v, r = _vr(vals, n)
    rec.context(_fingerprint(vals), vals)
    rec.check(n - 1, r[n - 1], 0.0, abs(r[n - 1]))
    rec.check(n - 1, v[n - 1], c, abs(v[n - 1] - c))


def _symmetrized_values(rng, n, i, j):
    """Random game in which players i and j are exchangeable."""
    base = _rand_values(rng, n)
    vals = np.empty_like(base)
    bi, bj = 1 << i, 1 << j
    for mask in range(1 << n):
        if mask & bj and not mask & bi:
            vals[mask] = base[(mask & ~bj) | bi]
        else:
            vals[mask] = base[mask]
    return vals


def _suite_symmetry(rec, rng, n):
    i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
    vals = _symmetrized_values(rng, n, i, j)
    v, r = _vr(vals, n)
    rec.context(_fingerprint(vals, [i, j]), vals, [i, j])
    rec.check(j, v[i], v[j], abs(v[i] - v[j]))
    rec.check(j, r[i], r[j], abs(r[i] - r[j]))


def _suite_strong_symmetry(rec, rng, n):
    # the two-player identity holds regardless of the requested n
    vals = _rand_values(rng, 2)
    _, r = _vr(vals, 2)
    rec.context(_fingerprint(vals), vals)
    rec.check(1, r[0], r[1], abs(r[0] - r[1]))


def _suite_variance_sum_bound(rec, rng, n):
    vals = _rand_values(rng, n)
    _, r = _vr(vals, n)
    total = r.sum()
    rec.context(_fingerprint(vals), vals)
    for i in range(n):
        bound = (n - 1) * (total - r[i])
        rec.check(i, r[i], bound, r[i] - bound)


_ALPHA_GRID = np.round(np.linspace(0.0, 1.0, 11), 1)


def _suite_convexity(rec, rng, n):
    g = _rand_values(rng, n)
    h = _rand_values(rng, n)
    _, rg = _vr(g, n)
    _, rh = _vr(h, n)
    rec.context(_fingerprint(g, h), g, h)
    for alpha in _ALPHA_GRID:
        _, rm = _vr(alpha * g + (1.0 - alpha) * h, n)
        bound = alpha * rg + (1.0 - alpha) * rh
        for i in range(n):
            rec.check(i, rm[i], bound[i], rm[i] - bound[i])


def _suite_corollary_sum(rec, rng, n):
    g = _rand_values(rng, n)
    h = _rand_values(rng, n)
    _, rg = _vr(g, n)
    _, rh = _vr(h, n)
    _, rs = _vr(g + h, n)
    rec.context(_fingerprint(g, h), g, h)
    for i in range(n):
        bound = 2.0 * (rg[i] + rh[i])
        rec.check(i, rs[i], bound, rs[i] - bound)


def _convex_size_values(rng, n):
    """Random nondecreasing-convex size profile with integer increments."""
    second = rng.integers(0, 4, size=n - 1)
    first = np.concatenate([[rng.integers(0, 4)], second]).cumsum()
    g_sizes = np.concatenate([[0.0], np.cumsum(first)]).astype(np.float64)
    sizes = _popcount_table(n)
    return g_sizes[sizes], g_sizes


def _popcount_table(n):
    p = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        p = np.concatenate([p, p + 1])
    return p


def _suite_symmetric_convex_superadd(rec, rng, n):
    g, gs = _convex_size_values(rng, n)
    h, hs = _convex_size_values(rng, n)
    _, rg = _vr(g, n)
    _, rh = _vr(h, n)
    _, rs = _vr(g + h, n)
    rec.context(_fingerprint(gs, hs), gs, hs)
    for i in range(n):
        lower = rg[i] + rh[i]
        rec.check(i, rs[i], lower, lower - rs[i])


def _suite_monotone_covariance_lemma(rec, rng, n):
    # two nonneg nondecreasing step functions on a random finite distribution
    k = int(rng.integers(2, 9))
    probs = rng.uniform(0.0, 1.0, k)
    probs /= probs.sum()
    f1 = np.cumsum(rng.uniform(0.0, 1.0, k))
    f2 = np.cumsum(rng.uniform(0.0, 1.0, k))
    lhs = float(np.dot(probs * f1, f2))
    rhs = float(np.dot(probs, f1) * np.dot(probs, f2))
    rec.context(_fingerprint(probs, f1, f2), probs, f1, f2)
    rec.check(-1, lhs, rhs, rhs - lhs)


def _suite_efficiency_per_ordering(rec, rng, n):
    vals = _rand_values(rng, n)
    grand = float(vals[-1])
    rec.context(_fingerprint(vals), vals)
    orderings = [tuple(range(n)), tuple(range(n - 1, -1, -1))]
    orderings += [tuple(rng.permutation(n).tolist()) for _ in range(4)]
    for perm in orderings:
        mask = 0
        total = 0.0
        for p in perm:
            total += vals[mask | (1 << p)] - vals[mask]
            mask |= 1 << p
        rec.check(-1, total, grand, abs(total - grand))


_SUITES = {
    "scaling": _suite_scaling,
    "dummy": _suite_dummy,
    "symmetry": _suite_symmetry,
    "strong-symmetry": _suite_strong_symmetry,
    "variance-sum-bound": _suite_variance_sum_bound,
    "convexity": _suite_convexity,
    "corollary-sum": _suite_corollary_sum,
    "symmetric-convex-superadd": _suite_symmetric_convex_superadd,
    "monotone-covariance-lemma": _suite_monotone_covariance_lemma,
    "efficiency-per-ordering": _suite_efficiency_per_ordering,
}


def run_property_suite(
    name: str, trials: int, seed: int, n: int = 5
) -> PropertyReport:
    """Check one proven property on ``trials`` random games of ``n`` players.

    Every property is a theorem, so any violation indicates an implementation
    bug; the report carries the offending instances. Trial ``t`` draws from a
    stream derived from ``(seed, t)``, so reports are reproducible.
    """
    if name not in _SUITES:
        raise ValueError(f"unknown property {name!r}; one of {', '.join(PROPERTIES)}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 2 <= n <= 12:
        raise ValueError("n must be between 2 and 12")
    suite = _SUITES[name]
    rec = _Recorder(name)
    for trial in range(trials):
        suite(rec, _trial_rng(seed, trial), n)
    return rec.report(trials)


def run_all_property_suites(trials: int, seed: int, n: int = 5):
    return [run_property_suite(name, trials, seed, n) for name in PROPERTIES]


# ---------------------------------------------------------------------------
# conjecture probe: lower bound for sums of superadditive games


@dataclass
class ConjectureProbeResult:
    n: int
    trials: int
    seed: int
    worst_ratio: float
    player: int
    witness_g: list
    witness_h: list
    skipped: int


def _is_superadditive_values(vals: np.ndarray, n: int, slack: float) -> bool:
    full = (1 << n) - 1
    for s in range(1, full + 1):
        vs = vals[s]
        rest = full & ~s
        t = rest
        while t:
            if vals[s | t] < vs + vals[t] - slack:
                return False
            t = (t - 1) & rest
    return True


def _draw_superadditive(rng, n: int, max_draws: int) -> np.ndarray:
    slack = 1e-12
    for _ in range(max_draws):
        vals = _rand_values(rng, n)
        if _is_superadditive_values(vals, n, slack):
            return vals
    raise RuntimeError(
        f"no superadditive game found in {max_draws} uniform draws at n={n}; "
        "acceptance of the uniform proposal decays steeply with n"
    )


def conjecture_probe(
    n: int, trials: int, seed: int, max_draws: int = 5_000_000
) -> ConjectureProbeResult:
    """Empirical minimum of ``r(G+H) / (r(G) + r(H))`` over superadditive pairs.

    This is an observed lower-bound candidate, not a proof. Pairs with a
    denominator below 1e-12 are skipped and counted.
    """
    if not 2 <= n <= 7:
        raise ValueError("n must be between 2 and 7")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    worst = math.inf
    worst_player = -1
    witness = None
    skipped = 0
    for _ in range(trials):
        g = _draw_superadditive(rng, n, max_draws)
        h = _draw_superadditive(rng, n, max_draws)
        _, rg = _vr(g, n)
        _, rh = _vr(h, n)
        _, rs = _vr(g + h, n)
        for i in range(n):
            den = rg[i] + rh[i]
            if den < 1e-12:
                skipped += 1
                continue
            ratio = rs[i] / den
            if ratio < worst:
                worst = ratio
                worst_player = i
                witness = (g.copy(), h.copy())
    if witness is None:
        raise DegenerateDenominators("every trial had a negligible denominator")
    return ConjectureProbeResult(
        n, trials, seed, worst, worst_player,
        witness[0].tolist(), witness[1].tolist(), skipped,
    )


# ---------------------------------------------------------------------------
# asymptotic sweeps


SWEEP_FAMILIES = (
    "majority",
    "production-worker",
    "production-capitalist",
    "market-trader",
)


@dataclass(frozen=True)
class SweepRow:
    n: int
    v: float
    r: float
    scaled: float
    actual_k: float | None = None


@dataclass
class SweepResult:
    family: str
    k: float | None
    ref_constant: float
    rows: list
    scaled_monotone: bool
    r_direction: str
    r_direction_ok: bool
    final_rel_gap: float

    @property
    def trend_ok(self) -> bool:
        """Monotone-trend diagnostic: one-directional scaled column and the
        uncertainty moving in the family's expected direction."""
        return self.scaled_monotone and self.r_direction_ok

    @property
    def within_quarter(self) -> bool:
        return self.final_rel_gap <= 0.25


def _two_type_row(n: int, k: float, type_a: bool) -> SweepRow:
    n_a = round(k * n)
    n_b = n - n_a
    if n_a < 1 or n_b < 1:
        raise SizeNotRepresentable(
            f"N={n} with k={k} rounds to {n_a} type-A players; need one of each type"
        )
    if n < 2:
        raise SizeNotRepresentable("need at least 2 players for the scaled column")
    worth = sqrt_product_worth(n_a, n_b)
    v, e2 = exact._two_type_moments(n_a, n_b, worth, type_a, SHAPLEY)
    prof = exact._finalize(0, v, e2)
    return SweepRow(n, prof.v, prof.r, prof.r * n / math.log(n), n_a / n)


def asymptotic_sweep(family: str, sizes, k: float | None = None) -> SweepResult:
    """Exact value/uncertainty over a size grid plus the theory-scaled column.

    Scaled column: ``r/N`` for the majority family (reference 1), else
    ``r*N/ln N`` (references ``1/(16(1-k)^3)`` for workers and ``1/(16k^3)``
    for capitalists / traders). The diagnostic flags report whether the
    scaled column is one-directional, whether the uncertainty grows
    (majority) or vanishes (economies) across the grid, and how close the
    scaled column ends up to the reference.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise SizeNotRepresentable("need a non-empty list of positive sizes")
    if sizes != sorted(sizes):
        raise SizeNotRepresentable("sizes must be increasing")
    rows = []
    if family == "majority":
        ref = 1.0
        expect = "increasing"
        for n in sizes:
            prof = exact.symmetric_profile(n, generate_majority(n).size_worth)
            rows.append(SweepRow(n, prof.v, prof.r, prof.r / n))
    elif family in ("production-worker", "production-capitalist", "market-trader"):
        if k is None or not 0.0 < k < 1.0:
            raise SizeNotRepresentable(f"k must lie strictly in (0, 1), got {k}")
        type_a = family != "production-worker"
        ref = 1.0 / (16.0 * k**3) if type_a else 1.0 / (16.0 * (1.0 - k) ** 3)
        expect = "decreasing"
        rows = [_two_type_row(n, k, type_a) for n in sizes]
    else:
        raise ValueError(f"unknown family {family!r}; one of {', '.join(SWEEP_FAMILIES)}")

    scaled = [row.scaled for row in rows]
    diffs = np.diff(scaled)
    eps = 1e-12
    scaled_monotone = bool(np.all(diffs >= -eps) or np.all(diffs <= eps))
    r_vals = [row.r for row in rows]
    r_diffs = np.diff(r_vals)
    if expect == "increasing":
        r_ok = bool(np.all(r_diffs >= -eps))
    else:
        r_ok = bool(np.all(r_diffs <= eps))
    final_gap = abs(scaled[-1] - ref) / abs(ref)
    return SweepResult(
        family, k if family != "majority" else None, ref, rows,
        scaled_monotone, expect, r_ok, final_gap,
    )

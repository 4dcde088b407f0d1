import math

import numpy as np
import pytest

from coalition_var import exact
from coalition_var.exact import (
    EmptyInput,
    GameTooLargeForExact,
    PlayerProfile,
    all_profiles,
    average_uncertainty,
    marginal_covariance,
    profile,
    symmetric_profile,
    two_type_profile,
)
from coalition_var.games import (
    SymmetricGame,
    TypeTag,
    generate_additive,
    generate_majority,
    generate_symmetric,
    generate_two_type,
    make_tabular,
    mix_games,
    scale_game,
    sqrt_product_worth,
    to_tabular,
)
from coalition_var.weights import BANZHAF, SHAPLEY, Weighting, shapley_size_weights

from conftest import EX2_R, EX2_V, random_values, rel_close
from oracles import brute_profile, table_value_fn


class TestExampleGame:
    def test_profiles_match_published_values(self, ex2):
        for i in range(3):
            p = profile(ex2, i)
            assert rel_close(p.v, EX2_V[i], 1e-10)
            assert rel_close(p.r, EX2_R[i], 1e-10)

    def test_all_profiles_single_pass_consistent(self, ex2):
        batch = all_profiles(ex2)
        for i, p in enumerate(batch):
            single = profile(ex2, i)
            assert p.player == i
            assert p.v == pytest.approx(single.v, rel=1e-12)
            assert p.r == pytest.approx(single.r, rel=1e-12)

    def test_average_uncertainty(self, ex2):
        assert average_uncertainty(all_profiles(ex2)) == pytest.approx(228.0)

    def test_sd_squares_back(self, ex2):
        for p in all_profiles(ex2):
            assert p.sd * p.sd == pytest.approx(p.r, rel=1e-12)


class TestAdditive:
    def test_integer_weights_zero_variance(self):
        g = generate_additive([1.0, 2.0, 3.0, 4.0])
        for i, p in enumerate(all_profiles(g)):
            assert p.v == pytest.approx(i + 1.0, rel=1e-12)
            assert p.r == 0.0

    def test_float_weights_near_zero_variance(self):
        rng = np.random.default_rng(3)
        g = generate_additive(rng.uniform(-1, 1, 6))
        for i, p in enumerate(all_profiles(g)):
            assert p.v == pytest.approx(g.weights[i], abs=1e-13)
            assert p.r <= 1e-12

    def test_single_player_constant(self):
        g = make_tabular(1, {(0,): 4.5})
        p = profile(g, 0)
        assert (p.v, p.r) == (4.5, 0.0)


class TestMajority:
    def test_three_players(self):
        p = symmetric_profile(3, generate_majority(3).size_worth)
        assert (p.v, p.r) == (1.0, 2.0)

    def test_exact_values_all_odd_sizes(self):
        for n in range(1, 101, 2):
            p = symmetric_profile(n, generate_majority(n).size_worth)
            assert p.v == 1.0
            assert p.r == float(n - 1)

    def test_linear_profile_no_variance(self):
        p = symmetric_profile(5, np.arange(6.0) * 2.0)
        assert p.r == 0.0


class TestFastPathEquivalence:
    def test_symmetric_matches_dense(self):
        rng = np.random.default_rng(11)
        for n in (2, 3, 5, 8, 10):
            table = rng.uniform(-2, 2, n + 1)
            table[0] = 0.0
            fast = symmetric_profile(n, table)
            dense = profile(to_tabular(SymmetricGame(n, table)), 0)
            assert rel_close(fast.v, dense.v, 1e-12)
            assert rel_close(fast.r, dense.r, 1e-12)

    def test_two_type_matches_dense(self):
        rng = np.random.default_rng(12)
        for n_a, n_b in ((1, 1), (2, 2), (3, 3), (4, 4), (6, 6), (2, 5), (5, 1)):
            worth = rng.uniform(-1, 1, (n_a + 1, n_b + 1))
            worth[0, 0] = 0.0
            g = generate_two_type(n_a, n_b, worth)
            dense = to_tabular(g)
            for player_type, player in ((TypeTag.A, 0), (TypeTag.B, n_a)):
                fast = two_type_profile(n_a, n_b, worth, player_type)
                ref = profile(dense, player)
                assert rel_close(fast.v, ref.v, 1e-10)
                assert rel_close(fast.r, ref.r, 1e-10)

    def test_profile_routes_fast_paths_past_dense_limit(self):
        # far beyond any feasible dense table
        p = profile(generate_majority(201), 0)
        assert (p.v, p.r) == (1.0, 200.0)
        g = generate_two_type(50, 50, sqrt_product_worth(50, 50))
        p = profile(g, 99)
        assert p.v == pytest.approx(0.5, rel=1e-12)

    def test_two_type_hand_case(self):
        p = two_type_profile(1, 1, sqrt_product_worth(1, 1), TypeTag.A)
        assert (p.v, p.r) == (0.5, 0.25)

    def test_worker_value_approaches_half_sqrt_ratio(self):
        # k = 1/2: the worker's value is exactly the limit by symmetry
        p = two_type_profile(200, 200, sqrt_product_worth(200, 200), TypeTag.B)
        assert abs(p.v - 0.5) <= 0.02 * 0.5


class TestWeightings:
    def test_banzhaf_equals_shapley_for_two_players(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            vals = random_values(rng, 2)
            g = make_tabular(2, {m: vals[m] for m in range(1, 4)})
            for i in range(2):
                assert profile(g, i, BANZHAF).v == pytest.approx(
                    profile(g, i, SHAPLEY).v, rel=1e-12
                )

    def test_banzhaf_against_brute(self, ex2):
        fn = table_value_fn(ex2.values, 3)
        for i in range(3):
            v, r = brute_profile(fn, 3, i, weighting="banzhaf")
            p = profile(ex2, i, BANZHAF)
            assert rel_close(p.v, v, 1e-12)
            assert rel_close(p.r, r, 1e-12)

    def test_custom_shapley_density_agrees(self, ex2):
        custom = Weighting.custom(shapley_size_weights(3))
        for i in range(3):
            a = profile(ex2, i, custom)
            b = profile(ex2, i, SHAPLEY)
            assert rel_close(a.v, b.v, 1e-12)
            assert rel_close(a.r, b.r, 1e-12)

    def test_banzhaf_fast_paths_match_dense(self):
        g = generate_majority(7)
        fast_v, fast_e2 = exact._symmetric_moments(g.size_worth, 7, BANZHAF)
        dense = profile(to_tabular(g), 0, BANZHAF)
        assert rel_close(fast_v, dense.v, 1e-12)
        assert rel_close(fast_e2 - fast_v**2, dense.r, 1e-10)


class TestSizeLimit:
    def test_too_large_suggests_sampling(self, monkeypatch):
        monkeypatch.setenv("COALITION_VAR_EXACT_LIMIT", "4")
        g = generate_additive([1.0] * 5)
        with pytest.raises(GameTooLargeForExact, match="sampling"):
            profile(g, 0)

    def test_env_override_allows(self, monkeypatch):
        monkeypatch.setenv("COALITION_VAR_EXACT_LIMIT", "5")
        g = generate_additive([1.0] * 5)
        assert profile(g, 0).v == pytest.approx(1.0)


class TestAverageUncertainty:
    def test_empty(self):
        with pytest.raises(EmptyInput):
            average_uncertainty([])

    def test_single(self):
        assert average_uncertainty([PlayerProfile(0, 1.0, 7.0, math.sqrt(7.0))]) == 7.0


class TestCovariance:
    def test_self_covariance_is_variance(self, ex2):
        for i in range(3):
            assert marginal_covariance(ex2, ex2, i) == pytest.approx(
                profile(ex2, i).r, rel=1e-12
            )

    def test_additive_covariance_zero(self, ex2):
        g = generate_additive([1.0, 2.0, 3.0])
        for i in range(3):
            assert marginal_covariance(g, ex2, i) == pytest.approx(0.0, abs=1e-12)

    def test_sum_decomposition(self, ex2):
        rng = np.random.default_rng(9)
        for _ in range(25):
            vals = random_values(rng, 3)
            h = make_tabular(3, {m: vals[m] for m in range(1, 8)})
            summed = make_tabular(3, {m: ex2.values[m] + vals[m] for m in range(1, 8)})
            for i in range(3):
                lhs = profile(summed, i).r
                rhs = (
                    profile(ex2, i).r
                    + profile(h, i).r
                    + 2.0 * marginal_covariance(ex2, h, i)
                )
                assert rel_close(lhs, rhs, 1e-9)

    def test_convex_symmetric_pair_nonnegative(self):
        g = generate_symmetric(3, [0.0, 0.0, 1.0, 3.0])
        h = generate_symmetric(3, [0.0, 1.0, 2.0, 4.0])
        for i in range(3):
            assert marginal_covariance(g, h, i) >= -1e-12

    def test_player_count_mismatch(self, ex2):
        with pytest.raises(ValueError):
            marginal_covariance(ex2, generate_additive([1.0]), 0)


class TestProvenInvariants:
    def test_scaling(self, ex2):
        rng = np.random.default_rng(21)
        for _ in range(10):
            t = float(rng.uniform(-10, 10))
            scaled = scale_game(ex2, t)
            for i in range(3):
                base = profile(ex2, i)
                s = profile(scaled, i)
                assert rel_close(s.v, t * base.v, 1e-10)
                assert rel_close(s.r, t * t * base.r, 1e-10)

    def test_dummy_player_zero_variance(self):
        # append a player contributing a flat 5 to the example game
        vals = {}
        base = dict(
            [((0,), 0.0), ((1,), 3.0), ((2,), 6.0), ((0, 1), 24.0),
             ((1, 2), 18.0), ((0, 2), 21.0), ((0, 1, 2), 60.0)]
        )
        for members, value in base.items():
            vals[members] = value
            vals[tuple(sorted(members + (3,)))] = value + 5.0
        vals[(3,)] = 5.0
        g = make_tabular(4, vals)
        p = profile(g, 3)
        assert abs(p.r) <= 1e-12
        assert p.v == pytest.approx(5.0, rel=1e-12)

    def test_two_player_equal_variance(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            vals = random_values(rng, 2)
            g = make_tabular(2, {m: vals[m] for m in range(1, 4)})
            profs = all_profiles(g)
            assert rel_close(profs[0].r, profs[1].r, 1e-12)

    def test_convexity_of_variance_in_game(self, ex2):
        rng = np.random.default_rng(34)
        vals = random_values(rng, 3)
        h = make_tabular(3, {m: vals[m] for m in range(1, 8)})
        for alpha in np.linspace(0, 1, 11):
            mixed = mix_games(ex2, h, float(alpha))
            for i in range(3):
                lhs = profile(mixed, i).r
                rhs = alpha * profile(ex2, i).r + (1 - alpha) * profile(h, i).r
                assert lhs <= rhs + 1e-9

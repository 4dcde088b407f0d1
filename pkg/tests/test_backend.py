"""Compiled and numpy kernel lanes must agree on identical inputs."""

import numpy as np
import pytest

from coalition_var import _backend, _kernels_py
from coalition_var.weights import shapley_size_weights

if not _backend.HAVE_COMPILED:
    pytest.skip("compiled lane not available", allow_module_level=True)

from coalition_var import _kernels  # noqa: E402  (import guarded above)


def _swaps(rng, m, n):
    swaps = np.empty((m, max(n - 1, 0)), dtype=np.int64)
    for t in range(n - 1):
        swaps[:, t] = rng.integers(0, n - t, size=m, dtype=np.int64)
    return swaps


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 11])
def test_tabular_moments_agree(n):
    rng = np.random.default_rng(n)
    values = rng.uniform(-1, 1, 1 << n)
    values[0] = 0.0
    wsize = shapley_size_weights(n)
    vc, ec = _kernels.tabular_moments(values, n, wsize)
    vp, ep = _kernels_py.tabular_moments(values, n, wsize)
    np.testing.assert_allclose(vc, vp, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(ec, ep, rtol=1e-12, atol=1e-15)


def test_tabular_moments_one_agrees():
    rng = np.random.default_rng(7)
    n = 9
    values = rng.uniform(-1, 1, 1 << n)
    wsize = shapley_size_weights(n)
    for i in (0, 4, 8):
        vc, ec = _kernels.tabular_moments_one(values, n, i, wsize)
        vp, ep = _kernels_py.tabular_moments_one(values, n, i, wsize)
        assert vc == pytest.approx(vp, rel=1e-12)
        assert ec == pytest.approx(ep, rel=1e-12)


def test_pair_moments_agree():
    rng = np.random.default_rng(8)
    n = 7
    g = rng.uniform(-1, 1, 1 << n)
    h = rng.uniform(-1, 1, 1 << n)
    wsize = shapley_size_weights(n)
    for i in range(n):
        out_c = _kernels.tabular_pair_moments(g, h, n, i, wsize)
        out_p = _kernels_py.tabular_pair_moments(g, h, n, i, wsize)
        assert out_c == pytest.approx(out_p, rel=1e-11, abs=1e-14)


def test_sampled_tabular_marginals_identical():
    rng = np.random.default_rng(9)
    n = 6
    values = rng.uniform(-1, 1, 1 << n)
    swaps = _swaps(rng, 500, n)
    for i in (0, 3, 5):
        dc = _kernels.sample_marginals_tabular(values, n, i, swaps)
        dp = _kernels_py.sample_marginals_tabular(values, n, i, swaps)
        assert np.array_equal(dc, dp)


def test_sampled_symmetric_marginals_identical():
    rng = np.random.default_rng(10)
    n = 31
    delta = rng.uniform(-1, 1, n)
    swaps = _swaps(rng, 400, n)
    dc = _kernels.sample_marginals_symmetric(delta, n, 17, swaps)
    dp = _kernels_py.sample_marginals_symmetric(delta, n, 17, swaps)
    assert np.array_equal(dc, dp)


def test_sampled_twotype_marginals_identical():
    rng = np.random.default_rng(11)
    n_a, n_b = 5, 8
    worth = rng.uniform(0, 2, (n_a + 1, n_b + 1))
    swaps = _swaps(rng, 400, n_a + n_b)
    for i in (0, 4, 5, 12):
        dc = _kernels.sample_marginals_twotype(worth, n_a, n_b, i, swaps)
        dp = _kernels_py.sample_marginals_twotype(worth, n_a, n_b, i, swaps)
        assert np.array_equal(dc, dp)


def test_sampled_additive_marginals_close():
    rng = np.random.default_rng(12)
    n = 7
    weights = rng.uniform(-1, 1, n)
    swaps = _swaps(rng, 300, n)
    dc = _kernels.sample_marginals_additive(weights, n, 2, swaps)
    dp = _kernels_py.sample_marginals_additive(weights, n, 2, swaps)
    # summation order differs between lanes; integer weights would be exact
    np.testing.assert_allclose(dc, dp, rtol=1e-12, atol=1e-15)


def test_single_player_swap_matrix():
    swaps = np.empty((10, 0), dtype=np.int64)
    values = np.array([0.0, 4.0])
    dc = _kernels.sample_marginals_tabular(values, 1, 0, swaps)
    dp = _kernels_py.sample_marginals_tabular(values, 1, 0, swaps)
    assert np.array_equal(dc, dp)
    assert np.all(dc == 4.0)

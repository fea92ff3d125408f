from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rispkg.channel import ChannelStats
from rispkg.keyrate import cascade_kernels, noise_var_for, rates_from_gain_cov, sum_secret_key_rate
from rispkg.optimize import (
    OptOptions,
    horizontal_gap_db,
    onoff_select,
    optimize_phases,
    random_average_rate,
    sumrate_curves,
)
from rispkg.ris import Mode, RisConfig, random_config
from rispkg.scenarios import multiuser_stats

FAST = OptOptions(restarts=3)


def _on(cfg):
    return set(np.nonzero(cfg.amplitudes)[0].tolist())


def test_onoff_picks_largest_variances():
    stats = ChannelStats(3, elem_gain=(3.0, 1.0, 2.0))
    assert _on(onoff_select(stats, 2)) == {0, 2}


def test_onoff_all_and_ties():
    stats = ChannelStats(5)
    assert _on(onoff_select(stats, 5)) == set(range(5))
    assert _on(onoff_select(stats, 1)) == {0}
    with pytest.raises(ValueError):
        onoff_select(stats, 0)


def test_flat_objective_without_element_correlation():
    stats = ChannelStats(6, n_uts=2, var_rb=(1.0, 0.5), rho_ut=0.5)
    cfg, rate = optimize_phases(stats, 10.0, FAST)
    zero = sum_secret_key_rate(stats, RisConfig.all_on(6, Mode.CONTINUOUS), 10.0)
    assert abs(rate - zero) < FAST.tol


def _toy():
    return ChannelStats(2, n_uts=2, var_rb=(1.0, 0.3), rho_ut=0.5, rho_elem=0.9, angle_rb=(0.8, -0.8))


def test_grid_oracle_two_elements():
    stats = _toy()
    snr = 10.0
    t = np.deg2rad(np.arange(360) - 180)
    a, b = np.meshgrid(t, t, indexing="ij")
    c = np.stack([np.exp(1j * a.ravel()), np.exp(1j * b.ravel())], axis=1)
    g = np.einsum("ti,abij,tj->tab", c, cascade_kernels(stats), c.conj())
    brute = rates_from_gain_cov(g, noise_var_for(stats, snr)).max()
    _, rate = optimize_phases(stats, snr)
    assert abs(rate - brute) < 1e-3


def test_determinism():
    stats = multiuser_stats(0.5, n_elements=8)
    a = optimize_phases(stats, 5.0, FAST, seed=4)
    b = optimize_phases(stats, 5.0, FAST, seed=4)
    assert a[0] == b[0] and a[1] == b[1]


def test_ascent_is_monotone():
    stats = multiuser_stats(0.5, n_elements=10)
    _, rate, traces = optimize_phases(stats, 0.0, OptOptions(restarts=4), return_traces=True)
    for tr in traces:
        assert all(y >= x for x, y in zip(tr, tr[1:]))
    assert rate == max(tr[-1] for tr in traces)


def test_noiseless_objective_rejected():
    with pytest.raises(FloatingPointError):
        optimize_phases(multiuser_stats(0.5, n_elements=4), math.inf, FAST)


stats_strategy = st.builds(
    lambda n, rho_ut, rho, a, v2: ChannelStats(n, n_uts=2, var_rb=(1.0, v2), rho_ut=rho_ut, rho_elem=rho, angle_rb=(a, -a)),
    st.integers(2, 6),
    st.floats(0.0, 0.8),
    st.floats(0.3, 0.95),
    st.floats(0.0, 1.2),
    st.floats(0.05, 1.0),
)


@settings(max_examples=15, deadline=None)
@given(stats_strategy, st.sampled_from([-5.0, 5.0, 15.0, 25.0]), st.integers(0, 2**31))
def test_dominates_baselines(stats, snr, seed):
    _, rate = optimize_phases(stats, snr, FAST, seed=seed)
    rng = np.random.default_rng(seed)
    tol = FAST.tol
    for _ in range(5):
        assert rate >= sum_secret_key_rate(stats, random_config(Mode.CONTINUOUS, stats.n_elements, rng), snr) - tol
    for k in range(1, stats.n_elements + 1):
        assert rate >= sum_secret_key_rate(stats, onoff_select(stats, k), snr) - tol


def test_random_average_matches_loop():
    stats = multiuser_stats(0.5, n_elements=6)
    avg = random_average_rate(stats, 5.0, 50, np.random.default_rng(1))
    rng = np.random.default_rng(1)
    c = np.exp(1j * rng.uniform(-np.pi, np.pi, (50, 6)))
    assert avg == pytest.approx(np.mean([sum_secret_key_rate(stats, ci, 5.0) for ci in c]))


def test_horizontal_gap_of_shifted_curve():
    s = np.arange(0.0, 30.0, 5.0)
    hi = np.log2(1 + 10 ** (s / 10))
    lo = np.log2(1 + 10 ** ((s - 4.0) / 10))
    assert horizontal_gap_db(s, hi, lo) == pytest.approx(4.0, abs=0.3)
    assert math.isnan(horizontal_gap_db(s, hi, hi + 100))
    with pytest.raises(ValueError):
        horizontal_gap_db(s, hi[::-1], lo)


@pytest.mark.slow
def test_ordering_at_rho_elem_07():
    grid = np.arange(-5.0, 30.0, 5.0)
    for rho in (0.0, 0.5):
        stats = multiuser_stats(rho, rho_elem=0.7)
        c = sumrate_curves(stats, grid, k_on=8, random_draws=100, opts=OptOptions(restarts=4), seed=2)
        assert np.all(c.optimized >= c.random) and np.all(c.random >= c.onoff)

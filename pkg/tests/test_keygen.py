from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from rispkg.keygen import (
    BitString,
    ReconcileParams,
    ZeroEntropyError,
    bdr,
    cdf_quantize,
    kgr,
    privacy_amplify,
    read_key_bin,
    read_key_hex,
    reconcile,
    rss_threshold_quantize,
    toeplitz_matrix,
    write_key_bin,
    write_key_hex,
)
from rispkg.probing import run_session
from rispkg.channel import ChannelStats
from rispkg.ris import Mode, RisSchedule, ScheduleKind

bits = st.lists(st.integers(0, 1), min_size=1, max_size=300)


def test_cdf_quantize_example():
    assert str(cdf_quantize([1, 2, 3, 4])) == "0011"


def test_cdf_tie_goes_to_zero():
    assert str(cdf_quantize([1, 2, 2, 3, 2])) == "00010"


def test_constant_series_is_zero_entropy():
    with pytest.raises(ZeroEntropyError):
        cdf_quantize([5, 5, 5, 5])
    with pytest.raises(ZeroEntropyError):
        rss_threshold_quantize([2, -2, 2, 2])


def test_cdf_balance(rng):
    b = cdf_quantize(rng.uniform(size=100_000))
    assert abs(b.bits.mean() - 0.5) < 0.01


def test_rss_example():
    assert str(rss_threshold_quantize(np.sqrt([0.1, 0.9, 0.1, 0.9]))) == "0101"


def test_rss_balance_on_symmetric_input(rng):
    # mean threshold on |x|^2 of a uniform amplitude is not a median split;
    # use a symmetric power distribution where it is
    b = rss_threshold_quantize(np.sqrt(rng.uniform(size=20_000)))
    assert abs(b.bits.mean() - 0.5) < 0.02


def test_rss_alternating_surface(rng):
    stats = ChannelStats(32, var_direct=1.0, gamma=0.9)
    sched = RisSchedule(ScheduleKind.ALTERNATING, 1, Mode.ONOFF, 32)
    wins = []
    for trial in range(20):
        s = run_session(stats, sched, 20.0, 200, "static", rng)
        b = rss_threshold_quantize(s.alice).bits
        pattern = (np.arange(200) % 2 == 0).astype(int)
        wins.append(np.mean(b == pattern))
    assert np.median(wins) >= 0.95


@pytest.mark.parametrize("a, b, want", [("0110", "0110", 0.0), ("0110", "1001", 1.0), ("0110", "0111", 0.25)])
def test_bdr_examples(a, b, want):
    assert bdr(BitString.from_str(a), BitString.from_str(b)) == want


def test_bdr_length_mismatch():
    with pytest.raises(ValueError):
        bdr(BitString.from_str("01"), BitString.from_str("011"))


def test_kgr_table_row():
    assert [round(kgr(l, 2e-3, 2e-3), 2) for l in (1, 2, 3, 4)] == [250.00, 166.67, 125.00, 100.00]
    assert kgr(1, 1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        kgr(1, 0.0, 1.0)


def test_no_ris_bdr_is_coin(rng):
    stats = ChannelStats(16, var_direct=1.0, gamma=0.0)
    s = run_session(stats, RisSchedule(ScheduleKind.RANDOM_PER_BLOCK, 1, Mode.BINARY, 16), 15.0, 10_000, "static", rng)
    assert abs(bdr(cdf_quantize(np.abs(s.alice)), cdf_quantize(np.abs(s.bob))) - 0.5) < 0.05


def test_bdr_non_increasing_in_l():
    from rispkg.scenarios import static_bdr

    vals = [static_bdr(True, 15.0, l, 10_000, seed=1) for l in (1, 2, 3, 4)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@settings(max_examples=50, deadline=None)
@given(bits)
def test_hex_and_bytes_round_trip(b):
    key = BitString(np.array(b, np.uint8))
    assert BitString.from_hex(key.to_hex(), len(key)) == key
    assert BitString.from_bytes(key.to_bytes(), len(key)) == key


def test_msb_first_packing():
    assert BitString.from_str("1000000011").to_bytes() == bytes([0x80, 0xC0])


def test_key_files(tmp_path):
    key = BitString.from_str("1011001110001")
    write_key_hex(tmp_path / "k.hex", key)
    write_key_bin(tmp_path / "k.bin", key)
    assert read_key_hex(tmp_path / "k.hex") == key
    assert read_key_bin(tmp_path / "k.bin") == key


def test_bitstring_rejects_non_binary():
    with pytest.raises(ValueError):
        BitString(np.array([0, 2]))


def test_reconcile_identical():
    a = BitString.from_str("1101" * 40)
    r = reconcile(a, a)
    assert r.key == a and r.failed_blocks == 0


def test_reconcile_every_single_error_pattern():
    p = ReconcileParams(r=4)
    rng = np.random.default_rng(0)
    a = BitString(rng.integers(0, 2, p.n * p.n, dtype=np.uint8))
    b = a.bits.copy().reshape(p.n, p.n)
    b[np.arange(p.n), np.arange(p.n)] ^= 1  # block i has its error at position i
    r = reconcile(a, BitString(b.reshape(-1)), p)
    assert r.failed_blocks == 0
    assert r.key_alice == a and r.key_bob == a
    assert r.leaked_bits == p.n * (p.n - p.k + p.hash_bits)


@pytest.mark.parametrize("flip", [0.05, 0.5])
def test_reconcile_failure_matches_binomial_tail(flip):
    p = ReconcileParams(r=5)
    rng = np.random.default_rng(1)
    n_blocks = 5000
    a = rng.integers(0, 2, n_blocks * p.n, dtype=np.uint8)
    b = a ^ (rng.random(a.size) < flip).astype(np.uint8)
    r = reconcile(BitString(a), BitString(b), p)
    beyond = binom.sf(p.t, p.n, flip)
    predicted = beyond * (1 - 2.0**-p.hash_bits)
    assert abs(r.failed_blocks / n_blocks - predicted) < 0.02


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2000), st.floats(0.0, 0.2), st.integers(0, 2**31))
def test_zero_failures_means_identical_keys(n, flip, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, n, dtype=np.uint8)
    b = a ^ (rng.random(n) < flip).astype(np.uint8)
    r = reconcile(BitString(a), BitString(b))
    if r.failed_blocks == 0:
        assert r.key_alice == r.key_bob
        out = max(1, len(r.key_alice) // 4)
        if out <= len(r.key_alice):
            assert privacy_amplify(r.key_alice, out, 9) == privacy_amplify(r.key_bob, out, 9)


def test_privacy_amplify_deterministic_and_matches_matrix(rng):
    key = BitString(rng.integers(0, 2, 300, dtype=np.uint8))
    y = privacy_amplify(key, 64, seed=4)
    assert y == privacy_amplify(key, 64, seed=4)
    expect = toeplitz_matrix(300, 64, 4).astype(int) @ key.bits.astype(int) % 2
    assert np.array_equal(y.bits, expect)


def test_privacy_amplify_rejects_long_output():
    key = BitString(np.ones(100, np.uint8))
    with pytest.raises(ValueError):
        privacy_amplify(key, 90, seed=0, leaked_bits=20)


def test_privacy_amplify_uniform(rng):
    keys = rng.integers(0, 2, (10_000, 256), dtype=np.uint8)
    out = np.array([privacy_amplify(BitString(k), 128, seed=2).bits for k in keys])
    assert np.all(np.abs(out.mean(axis=0) - 0.5) < 0.02)

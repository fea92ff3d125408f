from __future__ import annotations

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rispkg.keygen import BitString
from rispkg.randomness import (
    TestReport,
    block_frequency,
    cumulative_sums,
    longest_run,
    monobit,
    run_all,
    runs,
    write_reports,
)

# 100-bit expansion of e used by the NIST worked examples
E100 = (
    "1100100100001111110110101010001000100001011010001100"
    "001000110100110001001100011001100010100010111000"
)
LONGEST128 = (
    "11001100000101010110110001001100111000000000001001"
    "00110101010001000100111101011010000000110101111100"
    "1100111001101101100010110010"
)


@pytest.mark.parametrize(
    "fn, bits, kwargs, p",
    [
        (monobit, "1011010101", {}, 0.527089),
        (runs, "1001101011", {}, 0.147232),
        (block_frequency, "0110011010", {"block_len": 3}, 0.801252),
        (monobit, E100, {}, 0.109599),
        (runs, E100, {}, 0.500798),
        (block_frequency, E100, {"block_len": 10}, 0.706438),
        (cumulative_sums, E100, {}, 0.219194),
    ],
)
def test_worked_examples(fn, bits, kwargs, p):
    assert abs(fn(bits, relaxed=True, **kwargs).p_value - p) < 1e-5


def test_cusum_short_vector():
    # the worked example rounds through a normal table; exact evaluation
    # gives 0.4115847
    assert abs(cumulative_sums("1011010111", relaxed=True).p_value - 0.4116588) < 1e-4


def test_longest_run_vector():
    r = longest_run(LONGEST128, relaxed=True)
    # block counts (4, 9, 3, 0) match the worked example; its printed p-value
    # carries rounding of the chi-square statistic
    assert abs(r.p_value - 0.180609) < 1e-4


def test_all_zeros_fail_monobit():
    r = monobit(np.zeros(1000, dtype=np.uint8))
    assert r.p_value < 1e-6 and not r.passed


def test_alternating_discriminates():
    alt = np.arange(1000) % 2
    assert monobit(alt).passed
    assert not runs(alt).passed


@pytest.mark.parametrize(
    "fn, n, minimum",
    [(monobit, 99, 100), (runs, 50, 100), (block_frequency, 99, 100), (longest_run, 127, 128), (cumulative_sums, 10, 100)],
)
def test_minimum_length(fn, n, minimum):
    with pytest.raises(ValueError, match=str(minimum)):
        fn(np.ones(n, dtype=np.uint8))


def test_block_len_floor():
    with pytest.raises(ValueError):
        block_frequency(np.ones(200, dtype=np.uint8), block_len=10)


def test_report_invariants():
    with pytest.raises(ValueError):
        TestReport("x", 1.5, True, 10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(128, 4000), st.floats(0.001, 0.2))
def test_pass_iff_p_above_alpha(seed, n, alpha):
    bits = np.random.default_rng(seed).integers(0, 2, n)
    for r in run_all(bits, alpha, block_len=20):
        assert 0.0 <= r.p_value <= 1.0
        assert r.passed == (r.p_value >= alpha)
        assert r.n_bits == n


def test_accepts_bitstring_and_str():
    b = BitString.from_str(E100)
    assert monobit(b).p_value == monobit(E100).p_value


@pytest.mark.slow
def test_fair_coin_calibration():
    passes = np.zeros(5, dtype=int)
    for seed in range(100):
        bits = np.random.default_rng([77, seed]).integers(0, 2, 100_000)
        passes += [r.passed for r in run_all(bits)]
    assert np.all(passes >= 96), passes


def test_write_reports(tmp_path):
    bits = np.random.default_rng(1).integers(0, 2, 1000)
    path = tmp_path / "r.csv"
    write_reports(run_all(bits), path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["test", "n", "p", "pass"]
    assert [r[0] for r in rows[1:]] == ["monobit", "block_frequency", "runs", "longest_run", "cumulative_sums"]

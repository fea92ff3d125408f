"""Five tests of the NIST SP 800-22 battery.

Monobit, block frequency, runs, longest run of ones in a block and
cumulative sums (forward mode). P-values follow the published formulas.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

from .keygen import BitString

ALPHA = 0.01

MIN_BITS = {"monobit": 100, "block_frequency": 100, "runs": 100, "longest_run": 128, "cumulative_sums": 100}


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    test_name: str
    p_value: float
    passed: bool
    n_bits: int

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")


def _bits(bits) -> np.ndarray:
    b = bits.bits if isinstance(bits, BitString) else np.asarray(bits)
    if isinstance(bits, str):
        b = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    return b.astype(np.int64)


def _check_len(name: str, n: int, relaxed: bool) -> None:
    if not relaxed and n < MIN_BITS[name]:
        raise ValueError(f"{name} needs at least {MIN_BITS[name]} bits, got {n}")


def _report(name: str, p: float, n: int, alpha: float) -> TestReport:
    p = float(min(max(p, 0.0), 1.0))
    return TestReport(name, p, p >= alpha, n)


def monobit(bits, alpha: float = ALPHA, *, relaxed: bool = False) -> TestReport:
    b = _bits(bits)
    n = b.size
    _check_len("monobit", n, relaxed)
    s = abs(int(2 * b.sum() - n)) / math.sqrt(n)
    return _report("monobit", erfc(s / math.sqrt(2)), n, alpha)


def block_frequency(bits, block_len: int = 128, alpha: float = ALPHA, *, relaxed: bool = False) -> TestReport:
    b = _bits(bits)
    n = b.size
    _check_len("block_frequency", n, relaxed)
    if not relaxed and block_len < 20:
        raise ValueError("block_frequency needs block_len >= 20")
    nb = n // block_len
    if nb < 1:
        raise ValueError("sequence shorter than one block")
    pi = b[: nb * block_len].reshape(nb, block_len).mean(axis=1)
    chi2 = 4.0 * block_len * np.sum((pi - 0.5) ** 2)
    return _report("block_frequency", gammaincc(nb / 2, chi2 / 2), n, alpha)


def runs(bits, alpha: float = ALPHA, *, relaxed: bool = False) -> TestReport:
    b = _bits(bits)
    n = b.size
    _check_len("runs", n, relaxed)
    pi = b.mean()
    # frequency prerequisite: the test is not applicable to heavily biased input
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return _report("runs", 0.0, n, alpha)
    v = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    num = abs(v - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return _report("runs", erfc(num / den), n, alpha)


# (minimum n, block length M, class values; the end classes absorb the tails, class probabilities)
_LONGEST_RUN_TABLE = [
    (750000, 10000, (10, 11, 12, 13, 14, 15, 16), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6272, 128, (4, 5, 6, 7, 8, 9), (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (0, 8, (1, 2, 3, 4), (0.2148, 0.3672, 0.2305, 0.1875)),
]


def _longest_run_of_ones(block: np.ndarray) -> int:
    padded = np.concatenate([[0], block, [0]])
    d = np.diff(padded)
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0]
    return int((ends - starts).max(initial=0))


def longest_run(bits, alpha: float = ALPHA, *, relaxed: bool = False) -> TestReport:
    b = _bits(bits)
    n = b.size
    _check_len("longest_run", n, relaxed)
    m, bounds, probs = next((m, v, p) for min_n, m, v, p in _LONGEST_RUN_TABLE if n >= min_n)
    nb = n // m
    lengths = np.array([_longest_run_of_ones(blk) for blk in b[: nb * m].reshape(nb, m)])
    clipped = np.clip(lengths, bounds[0], bounds[-1])
    counts = np.array([(clipped == v).sum() for v in bounds])
    probs = np.asarray(probs)
    chi2 = float(np.sum((counts - nb * probs) ** 2 / (nb * probs)))
    return _report("longest_run", gammaincc((len(bounds) - 1) / 2, chi2 / 2), n, alpha)


def cumulative_sums(bits, alpha: float = ALPHA, *, relaxed: bool = False, reverse: bool = False) -> TestReport:
    b = _bits(bits)
    n = b.size
    _check_len("cumulative_sums", n, relaxed)
    x = 2 * b - 1
    if reverse:
        x = x[::-1]
    z = int(np.abs(np.cumsum(x)).max())
    if z == 0:
        return _report("cumulative_sums", 0.0, n, alpha)
    sq = math.sqrt(n)
    k1 = np.arange(int((-n / z + 1) // 4), int((n / z - 1) // 4) + 1)
    k2 = np.arange(int((-n / z - 3) // 4), int((n / z - 1) // 4) + 1)
    p = (
        1.0
        - np.sum(norm.cdf((4 * k1 + 1) * z / sq) - norm.cdf((4 * k1 - 1) * z / sq))
        + np.sum(norm.cdf((4 * k2 + 3) * z / sq) - norm.cdf((4 * k2 + 1) * z / sq))
    )
    return _report("cumulative_sums", p, n, alpha)


def run_all(bits, alpha: float = ALPHA, block_len: int = 128) -> list[TestReport]:
    return [
        monobit(bits, alpha),
        block_frequency(bits, block_len, alpha),
        runs(bits, alpha),
        longest_run(bits, alpha),
        cumulative_sums(bits, alpha),
    ]


def write_reports(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["test", "n", "p", "pass"])
        for r in reports:
            w.writerow([r.test_name, r.n_bits, f"{r.p_value:.6g}", int(r.passed)])

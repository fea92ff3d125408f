"""From observation series to keys.

Quantization, disagreement/rate accounting, block-code reconciliation and
Toeplitz-hash privacy amplification.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

ORIGINS = ("alice", "bob", "eve")


class ZeroEntropyError(ValueError):
    """Quantizer input carries no randomness (constant series)."""


@dataclass(frozen=True, eq=False)
class BitString:
    bits: np.ndarray
    origin: str | None = None

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if b.size and not np.isin(b, (0, 1)).all():
            raise ValueError("bits must be 0/1")
        b = b.astype(np.uint8)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)
        if self.origin is not None and self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits.tolist()))

    @classmethod
    def from_str(cls, s: str, origin: str | None = None) -> "BitString":
        return cls(np.frombuffer(s.strip().encode(), dtype=np.uint8) - ord("0"), origin)

    def to_bytes(self) -> bytes:
        # MSB first, last byte zero-padded
        return np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, n_bits: int, origin: str | None = None) -> "BitString":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if n_bits > bits.size:
            raise ValueError("declared bit length exceeds the data")
        return cls(bits[:n_bits], origin)

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_hex(cls, text: str, n_bits: int, origin: str | None = None) -> "BitString":
        return cls.from_bytes(bytes.fromhex(text), n_bits, origin)


def write_key_hex(path, key: BitString) -> None:
    """``bits=<n>`` header line followed by the hex digits."""
    Path(path).write_text(f"bits={len(key)}\n{key.to_hex()}\n")


def read_key_hex(path) -> BitString:
    header, hexdigits = Path(path).read_text().splitlines()[:2]
    return BitString.from_hex(hexdigits, _parse_header(header))


def write_key_bin(path, key: BitString) -> None:
    """Raw packed bytes; the bit length goes to a ``<path>.len`` sidecar."""
    Path(path).write_bytes(key.to_bytes())
    Path(str(path) + ".len").write_text(f"bits={len(key)}\n")


def read_key_bin(path) -> BitString:
    n = _parse_header(Path(str(path) + ".len").read_text().strip())
    return BitString.from_bytes(Path(path).read_bytes(), n)


def _parse_header(line: str) -> int:
    key, _, value = line.partition("=")
    if key.strip() != "bits":
        raise ValueError(f"bad key header {line!r}")
    return int(value)


def _threshold_bits(x: np.ndarray, threshold: float, origin) -> BitString:
    return BitString((x > threshold).astype(np.uint8), origin)


def cdf_quantize(series, origin: str | None = None) -> BitString:
    """Single-bit CDF quantizer: 1 above the series' own median, else 0."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-D series of length >= 2")
    if np.ptp(x) == 0:
        raise ZeroEntropyError("constant series")
    return _threshold_bits(x, float(np.median(x)), origin)


def rss_threshold_quantize(series, origin: str | None = None) -> BitString:
    """Single-threshold RSS quantizer on ``|series|**2`` (threshold = mean).

    Real inputs are treated as amplitudes.
    """
    x = np.abs(np.asarray(series)) ** 2
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-D series of length >= 2")
    if np.ptp(x) == 0:
        raise ZeroEntropyError("constant series")
    return _threshold_bits(x, float(x.mean()), origin)


def cdf_quantize_columns(x: np.ndarray) -> np.ndarray:
    """CDF-quantize each column of a (T, K) array against its own median."""
    x = np.asarray(x, dtype=float)
    return (x > np.median(x, axis=0, keepdims=True)).astype(np.uint8)


def bdr(a: BitString | np.ndarray, b: BitString | np.ndarray) -> float:
    """Bit disagreement rate: Hamming distance over length."""
    a = a.bits if isinstance(a, BitString) else np.asarray(a)
    b = b.bits if isinstance(b, BitString) else np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty bit strings")
    return float(np.mean(a != b))


def kgr(l: int, t_probe_s: float, t_update_s: float) -> float:
    """Key generation rate after quantization, bits/s: 1 / (L*T_p + T_u)."""
    if l < 1 or t_probe_s <= 0 or t_update_s < 0:
        raise ValueError("need L >= 1, T_p > 0 and T_u >= 0")
    return 1.0 / (l * t_probe_s + t_update_s)


# ---------------------------------------------------------------- reconciliation


def hamming_parity_check(r: int) -> np.ndarray:
    """Parity-check matrix of the (2^r - 1, 2^r - 1 - r) Hamming code.

    Column ``j`` is the binary expansion of ``j + 1`` so that a syndrome read
    as an integer names the flipped position directly.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    n = 2**r - 1
    cols = np.arange(1, n + 1)
    return ((cols[None, :] >> np.arange(r)[:, None]) & 1).astype(np.uint8)


@dataclass(frozen=True)
class ReconcileParams:
    """Syndrome reconciliation with a Hamming code and a per-block check hash.

    The hash is a seeded random linear map to ``hash_bits`` bits; a block whose
    corrected word still differs from Alice's passes it with probability
    ``2**-hash_bits``.
    """

    r: int = 5
    hash_bits: int = 8
    hash_seed: int = 0

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if self.hash_bits < 0:
            raise ValueError("hash_bits must be >= 0")

    @property
    def n(self) -> int:
        return 2**self.r - 1

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def t(self) -> int:
        return 1

    @property
    def parity_check(self) -> np.ndarray:
        return hamming_parity_check(self.r)

    def hash_matrix(self) -> np.ndarray:
        rng = np.random.default_rng([self.hash_seed, self.r, self.hash_bits])
        return rng.integers(0, 2, (self.hash_bits, self.n), dtype=np.uint8)


@dataclass(frozen=True)
class ReconcileResult:
    key_alice: BitString
    key_bob: BitString
    leaked_bits: int
    failed_blocks: int
    n_blocks: int

    @property
    def key(self) -> BitString:
        return self.key_alice


def reconcile(a: BitString, b: BitString, params: ReconcileParams = ReconcileParams()) -> ReconcileResult:
    """One-way syndrome reconciliation toward Alice's string.

    Both strings are zero-padded to a whole number of code blocks. Per block
    Alice discloses her syndrome and check hash (``n - k + hash_bits`` bits
    leaked); Bob flips the position named by the syndrome difference and
    compares hashes. Blocks whose hashes disagree are dropped by both sides.
    Padding is stripped from the returned keys.
    """
    if len(a) != len(b):
        raise ValueError("keys must have equal length")
    n = params.n
    total = len(a)
    n_blocks = -(-total // n)
    pad = n_blocks * n - total
    A = np.concatenate([a.bits, np.zeros(pad, np.uint8)]).reshape(n_blocks, n)
    B = np.concatenate([b.bits, np.zeros(pad, np.uint8)]).reshape(n_blocks, n)
    H = params.parity_check.astype(np.int64)
    weights = 1 << np.arange(params.r)
    syn = ((A @ H.T) % 2 ^ (B @ H.T) % 2) @ weights
    Bc = B.copy()
    rows = np.nonzero(syn)[0]
    Bc[rows, syn[rows] - 1] ^= 1
    G = params.hash_matrix().astype(np.int64)
    ok = np.all((A @ G.T) % 2 == (Bc @ G.T) % 2, axis=1)

    keep = np.repeat(ok, n)
    keep[total:] = False  # padding
    key_a = A.reshape(-1)[keep]
    key_b = Bc.reshape(-1)[keep]
    leaked = n_blocks * (params.r + params.hash_bits)
    return ReconcileResult(
        BitString(key_a, "alice"), BitString(key_b, "bob"), leaked, int((~ok).sum()), n_blocks
    )


# ------------------------------------------------------------ privacy amplification


def toeplitz_seed_bits(n_in: int, out_len: int, seed: int) -> np.ndarray:
    return np.random.default_rng([seed, n_in, out_len]).integers(0, 2, n_in + out_len - 1, dtype=np.uint8)


def privacy_amplify(key: BitString, out_len: int, seed: int, leaked_bits: int = 0) -> BitString:
    """Compress ``key`` with a seed-derived binary Toeplitz matrix.

    ``T[i, j] = s[i - j + n - 1]`` for the seed string ``s`` of length
    ``n + out_len - 1``; the output is ``T @ key mod 2``.
    """
    n = len(key)
    if out_len < 1:
        raise ValueError("out_len must be >= 1")
    if out_len > n - leaked_bits:
        raise ValueError(f"out_len {out_len} exceeds key length minus leakage ({n - leaked_bits})")
    s = toeplitz_seed_bits(n, out_len, seed).astype(float)
    # y_i = sum_j s[i - j + n - 1] k_j = (s * k)[i + n - 1]
    conv = fftconvolve(s, key.bits.astype(float))[n - 1 : n - 1 + out_len]
    return BitString(np.rint(conv).astype(np.int64) % 2, key.origin)


def toeplitz_matrix(n_in: int, out_len: int, seed: int) -> np.ndarray:
    """Explicit matrix form of the hash used by :func:`privacy_amplify`."""
    s = toeplitz_seed_bits(n_in, out_len, seed)
    i = np.arange(out_len)[:, None]
    j = np.arange(n_in)[None, :]
    return s[i - j + n_in - 1]

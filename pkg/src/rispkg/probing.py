"""Bidirectional TDD channel sounding.

A probe is one forward (Alice -> Bob) and one reverse (Bob -> Alice) pilot
inside a single coherence interval. Estimation is modelled at the CSI level:
each party observes the true composite gain plus circular complex Gaussian
noise. Eve overhears Alice's forward pilot through her own links.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.random import Generator

from .channel import ChannelStats, draw_realization
from .ris import Mode, RisConfig, RisSchedule, ScheduleKind, random_coeff_matrix, reflection_coeffs

STATIC = "static"
PER_BLOCK = "per-block"


@dataclass(frozen=True)
class ProbeRecord:
    probe_index: int
    cfg_forward: RisConfig
    cfg_reverse: RisConfig
    obs_alice: complex | np.ndarray
    obs_bob: complex | np.ndarray
    obs_eve: complex | np.ndarray


@dataclass(eq=False)
class ProbeSession:
    """Time-ordered paired observations.

    Observation arrays have shape ``(T,)`` for narrowband sessions or
    ``(T, K)`` for per-subcarrier CSI. Configurations are stored once in
    ``configs`` (one row of coefficients per distinct configuration) and
    referenced per probe through ``fwd_idx``/``rev_idx``.
    """

    alice: np.ndarray
    bob: np.ndarray
    eve: np.ndarray
    configs: np.ndarray
    fwd_idx: np.ndarray
    rev_idx: np.ndarray
    mode: Mode
    snr_db: float
    noise_var: float
    l_oversample: int = 1
    t_probe_s: float = 2e-3
    t_update_s: float = 2e-3

    def __post_init__(self):
        if len(self.alice) == 0:
            raise ValueError("session has no probes")
        if not (self.alice.shape == self.bob.shape == self.eve.shape):
            raise ValueError("observation arrays must share one shape")
        if len(self.fwd_idx) != len(self.alice) or len(self.rev_idx) != len(self.alice):
            raise ValueError("configuration index arrays must have one entry per probe")
        if self.l_oversample < 1:
            raise ValueError("l_oversample must be >= 1")

    def __len__(self) -> int:
        return len(self.alice)

    def config(self, i: int) -> RisConfig:
        return RisConfig.from_coeffs(self.mode, self.configs[i])

    def records(self) -> Iterator[ProbeRecord]:
        for t in range(len(self)):
            yield ProbeRecord(
                t,
                self.config(self.fwd_idx[t]),
                self.config(self.rev_idx[t]),
                self.alice[t],
                self.bob[t],
                self.eve[t],
            )


def noise_variance(signal: np.ndarray, snr_db: float) -> float:
    """Noise power giving ``snr_db`` relative to the mean power of ``signal``."""
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"invalid SNR {snr_db!r}")
    if snr_db == math.inf:
        return 0.0
    p = float(np.mean(np.abs(signal) ** 2))
    return p / 10 ** (snr_db / 10)


def add_noise(signal: np.ndarray, noise_var: float, rng: Generator) -> np.ndarray:
    if noise_var == 0.0:
        return np.array(signal, dtype=complex, copy=True)
    sd = math.sqrt(noise_var / 2)
    return signal + sd * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))


def _schedule_indices(schedule: RisSchedule, n_probes: int, rng: Generator):
    """Coefficient table and per-probe forward/reverse indices for a schedule."""
    n = schedule.n_elements
    kind = schedule.kind
    probes = np.arange(n_probes)
    block = probes // schedule.block_len
    if kind is ScheduleKind.HOLD:
        cfg = schedule.hold_config or RisConfig.all_on(n, schedule.mode)
        table = reflection_coeffs(cfg)[None, :]
        zeros = np.zeros(n_probes, dtype=np.int64)
        return table, cfg.mode, zeros, zeros
    if kind is ScheduleKind.ALTERNATING:
        table = np.stack([np.ones(n, dtype=np.int8), np.zeros(n, dtype=np.int8)])
        idx = (block % 2).astype(np.int64)
        return table, Mode.ONOFF, idx, idx
    if kind is ScheduleKind.ATTACKER:
        table = random_coeff_matrix(schedule.mode, 2 * n_probes, n, rng)
        return table, schedule.mode, 2 * probes, 2 * probes + 1
    n_blocks = int(block[-1]) + 1
    table = schedule.block_coeffs(np.arange(n_blocks))
    return table, schedule.mode, block.astype(np.int64), block.astype(np.int64)


def _gains(coeffs: np.ndarray, products: np.ndarray, chunk: int = 16384) -> np.ndarray:
    out = np.empty(coeffs.shape[0], dtype=complex)
    for s in range(0, coeffs.shape[0], chunk):
        out[s : s + chunk] = coeffs[s : s + chunk].astype(complex) @ products
    return out


def run_session(
    stats: ChannelStats,
    schedule: RisSchedule,
    snr_db: float,
    n_probes: int,
    realization_policy: str,
    rng: Generator,
    *,
    coherence_len: int | None = None,
    ut: int = 0,
    t_probe_s: float = 2e-3,
    t_update_s: float = 2e-3,
) -> ProbeSession:
    """Run a narrowband sounding session.

    ``realization_policy`` is ``"static"`` (one realization for all probes)
    or ``"per-block"`` (redrawn every ``coherence_len`` probes, default the
    schedule's block length). The noise variance is set from the mean power
    of the noiseless forward and reverse gains of the whole session, and is
    the same for Alice, Bob and Eve.
    """
    if n_probes < 1:
        raise ValueError("n_probes must be >= 1")
    if schedule.n_elements != stats.n_elements:
        raise ValueError("schedule and channel disagree on the number of elements")
    if realization_policy not in (STATIC, PER_BLOCK):
        raise ValueError(f"unknown realization policy {realization_policy!r}")
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"invalid SNR {snr_db!r}")
    table, mode, fwd, rev = _schedule_indices(schedule, n_probes, rng)

    coh = n_probes if realization_policy == STATIC else (coherence_len or schedule.block_len)
    true_b = np.empty(n_probes, dtype=complex)
    true_a = np.empty(n_probes, dtype=complex)
    true_e = np.empty(n_probes, dtype=complex)
    for start in range(0, n_probes, coh):
        sl = slice(start, min(start + coh, n_probes))
        real = draw_realization(stats, rng)
        prod = real.cascade_products(ut)
        direct = real.h_direct.sum()
        uniq_f, inv_f = np.unique(fwd[sl], return_inverse=True)
        uniq_r, inv_r = np.unique(rev[sl], return_inverse=True)
        true_b[sl] = (_gains(table[uniq_f], prod) + direct)[inv_f]
        true_a[sl] = (_gains(table[uniq_r], prod) + direct)[inv_r]
        true_e[sl] = (_gains(table[uniq_f], real.eve_products()) + real.h_eve_direct.sum())[inv_f]

    nv = noise_variance(np.concatenate([true_a, true_b]), snr_db)
    bob = add_noise(true_b, nv, rng)
    alice = add_noise(true_a, nv, rng)
    eve = add_noise(true_e, nv, rng)
    return ProbeSession(
        alice, bob, eve, table, fwd, rev, mode, float(snr_db), nv,
        l_oversample=schedule.block_len, t_probe_s=t_probe_s, t_update_s=t_update_s,
    )


def block_average(series, l: int) -> np.ndarray:
    """Means of consecutive non-overlapping blocks of ``l`` samples along axis 0.

    A trailing partial block is dropped.
    """
    if l < 1:
        raise ValueError("block length must be >= 1")
    x = np.asarray(series)
    nb = x.shape[0] // l
    return x[: nb * l].reshape(nb, l, *x.shape[1:]).mean(axis=1)


def write_trace(session: ProbeSession, path) -> None:
    """CSV trace: one row per probe (and subcarrier for wideband sessions)."""
    a, b, e = (np.asarray(x) for x in (session.alice, session.bob, session.eve))
    wide = a.ndim == 2
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["probe_index", "subcarrier", "alice_re", "alice_im", "bob_re", "bob_im", "eve_re", "eve_im"])
        for t in range(a.shape[0]):
            for k in range(a.shape[1] if wide else 1):
                idx = (t, k) if wide else t
                w.writerow([t, k] + [f"{v:.17g}" for z in (a[idx], b[idx], e[idx]) for v in (z.real, z.imag)])


def read_trace(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`write_trace`; returns (alice, bob, eve) arrays."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = rows[:, 0].astype(int)
    k = rows[:, 1].astype(int)
    shape = (t.max() + 1, k.max() + 1)
    out = []
    for c in (2, 4, 6):
        z = np.zeros(shape, dtype=complex)
        z[t, k] = rows[:, c] + 1j * rows[:, c + 1]
        out.append(z[:, 0] if shape[1] == 1 else z)
    return tuple(out)

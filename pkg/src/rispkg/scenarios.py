"""Scenario runners shared by the CLI, the scripts and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .channel import ChannelStats
from .keygen import BitString, bdr, cdf_quantize
from .keyrate import ksg_mi
from .probing import ProbeSession, block_average, run_session
from .ris import Mode, RisSchedule, ScheduleKind

STATIC_N_ELEMENTS = 128
SUMRATE_SNR_GRID = tuple(float(s) for s in range(-15, 40, 5))


def static_stats(with_ris: bool = True, gamma: float = 0.5, n_elements: int = STATIC_N_ELEMENTS) -> ChannelStats:
    """Indoor static link: direct path plus a binary surface carrying ``gamma``.

    Without the surface the same link is used with ``gamma = 0``.
    """
    return ChannelStats(n_elements, var_direct=1.0, gamma=gamma if with_ris else 0.0)


@dataclass(frozen=True, eq=False)
class StaticRun:
    session: ProbeSession
    alice: BitString
    bob: BitString
    eve: BitString

    @property
    def bdr_ab(self) -> float:
        return bdr(self.alice, self.bob)

    @property
    def bdr_ae(self) -> float:
        return bdr(self.alice, self.eve)


def static_run(stats: ChannelStats, snr_db: float, l: int, n_bits: int, rng: Generator, *, schedule_seed: int | None = None) -> StaticRun:
    """One static realization, a fresh random binary configuration every ``l``
    probes, block-averaged observations CDF-quantized on their magnitude."""
    if schedule_seed is None:
        schedule_seed = int(rng.integers(2**63))
    sched = RisSchedule(ScheduleKind.RANDOM_PER_BLOCK, l, Mode.BINARY, stats.n_elements, schedule_seed)
    s = run_session(stats, sched, snr_db, n_bits * l, "static", rng)
    bits = {p: cdf_quantize(np.abs(block_average(getattr(s, p), l)), p) for p in ("alice", "bob", "eve")}
    return StaticRun(s, bits["alice"], bits["bob"], bits["eve"])


def static_bdr(with_ris: bool, snr_db: float, l: int, n_bits: int, seed: int) -> float:
    return static_run(static_stats(with_ris), snr_db, l, n_bits, np.random.default_rng([seed, l])).bdr_ab


def static_mi(snr_db: float, n_samples: int, seed: int, k: int = 4) -> tuple[float, float]:
    """KSG estimates of I(Alice; Bob) and I(Alice; Eve) per observation.

    Estimated on the observation magnitudes, the feature the key bits are
    quantized from.
    """
    run = static_run(static_stats(), snr_db, 1, n_samples, np.random.default_rng(seed))
    a, b, e = (np.abs(getattr(run.session, p)) for p in ("alice", "bob", "eve"))
    return ksg_mi(a, b, k), ksg_mi(a, e, k)


def random_key_bits(n_bits: int, seed: int, snr_db: float = 20.0) -> BitString:
    """Alice's quantized bits from the random-surface static scenario."""
    return static_run(static_stats(), snr_db, 1, n_bits, np.random.default_rng(seed)).alice


def multiuser_stats(
    rho_ut: float,
    *,
    n_elements: int = 16,
    rho_elem: float = 0.8,
    angle: float = 0.8,
    var_rb: tuple[float, ...] = (1.0, 0.05),
) -> ChannelStats:
    """Two-UT surface model of the sum-rate comparison.

    UTs sit on opposite sides of the surface (element correlation phases
    ``+angle`` and ``-angle``); the second UT is the weaker one. There is no
    direct link.
    """
    m = len(var_rb)
    angles = tuple(angle * (1 if j % 2 == 0 else -1) for j in range(m))
    return ChannelStats(n_elements, m, var_rb=var_rb, rho_ut=rho_ut, rho_elem=rho_elem, angle_rb=angles)

"""Surface configurations and configuration schedules.

A configuration is stored as per-element phases and amplitudes; the
reflection coefficient of element ``n`` is ``amplitudes[n] * exp(1j * phases[n])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.random import Generator


class Mode(str, Enum):
    CONTINUOUS = "continuous-phase"
    BINARY = "binary-phase"
    ONOFF = "on-off"


class ScheduleKind(str, Enum):
    HOLD = "hold"
    RANDOM_PER_BLOCK = "random-per-block"
    ALTERNATING = "alternating-all-on-off"
    ATTACKER = "attacker-per-direction"


FORWARD = 0
REVERSE = 1


def _wrap(phases: np.ndarray) -> np.ndarray:
    # into [-pi, pi)
    return (np.asarray(phases, dtype=float) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True, eq=False)
class RisConfig:
    mode: Mode
    phases: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        mode = Mode(self.mode)
        phases = _wrap(self.phases)
        amps = np.asarray(self.amplitudes, dtype=float)
        if phases.ndim != 1 or phases.shape != amps.shape or phases.size == 0:
            raise ValueError("phases and amplitudes must be equal-length, nonempty 1-D sequences")
        if mode is Mode.CONTINUOUS:
            if not np.allclose(amps, 1.0):
                raise ValueError("continuous-phase mode requires unit amplitudes")
        elif mode is Mode.BINARY:
            if not np.allclose(amps, 1.0):
                raise ValueError("binary-phase mode requires unit amplitudes")
            on_grid = np.isclose(phases, 0.0) | np.isclose(np.abs(phases), np.pi)
            if not on_grid.all():
                raise ValueError("binary-phase mode requires phases in {0, pi}")
            phases = np.where(np.isclose(phases, 0.0), 0.0, -np.pi)
        else:
            if not np.all(np.isin(amps, (0.0, 1.0))):
                raise ValueError("on-off mode requires amplitudes in {0, 1}")
            if not np.allclose(phases, 0.0):
                raise ValueError("on-off mode pins phases to 0")
            phases = np.zeros_like(phases)
        phases.flags.writeable = False
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.phases.size

    def __eq__(self, other):
        if not isinstance(other, RisConfig):
            return NotImplemented
        return (
            self.mode is other.mode
            and np.array_equal(self.phases, other.phases)
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    @classmethod
    def from_coeffs(cls, mode: Mode | str, coeffs) -> "RisConfig":
        coeffs = np.asarray(coeffs, dtype=complex)
        amps = np.abs(coeffs)
        phases = np.where(amps > 0, np.angle(coeffs), 0.0)
        if Mode(mode) is not Mode.CONTINUOUS:
            amps = np.round(amps)
        return cls(mode, phases, amps)

    @classmethod
    def all_on(cls, n: int, mode: Mode | str = Mode.ONOFF) -> "RisConfig":
        return cls(mode, np.zeros(n), np.ones(n))

    @classmethod
    def all_off(cls, n: int) -> "RisConfig":
        return cls(Mode.ONOFF, np.zeros(n), np.zeros(n))


def reflection_coeffs(cfg: RisConfig) -> np.ndarray:
    """Per-element complex reflection coefficients."""
    coeffs = cfg.amplitudes * np.exp(1j * cfg.phases)
    if cfg.mode is not Mode.CONTINUOUS:
        # exact {0, +-1}: exp(1j*pi) carries a 1e-16 imaginary residue
        coeffs = coeffs.real.round() + 0j
    return coeffs


def random_config(mode: Mode | str, n: int, rng: Generator) -> RisConfig:
    if n < 1:
        raise ValueError(f"number of elements must be >= 1, got {n}")
    mode = Mode(mode)
    if mode is Mode.CONTINUOUS:
        return RisConfig(mode, rng.uniform(-np.pi, np.pi, n), np.ones(n))
    if mode is Mode.BINARY:
        return RisConfig(mode, np.where(rng.integers(0, 2, n) == 1, -np.pi, 0.0), np.ones(n))
    return RisConfig(mode, np.zeros(n), rng.integers(0, 2, n).astype(float))


def random_coeff_matrix(mode: Mode | str, rows: int, n: int, rng: Generator) -> np.ndarray:
    """``rows`` random configurations as a coefficient matrix.

    Binary and on-off modes come back as ``int8`` (the coefficients are real
    integers), which keeps long probing sessions compact.
    """
    mode = Mode(mode)
    if n < 1:
        raise ValueError(f"number of elements must be >= 1, got {n}")
    if mode is Mode.CONTINUOUS:
        return np.exp(1j * rng.uniform(-np.pi, np.pi, (rows, n)))
    bits = rng.integers(0, 2, (rows, n), dtype=np.int8)
    if mode is Mode.BINARY:
        return (1 - 2 * bits).astype(np.int8)
    return bits


@dataclass(frozen=True)
class RisSchedule:
    """How the surface changes over a probing session.

    ``seed`` keys the per-block draws of ``random-per-block``: blocks are
    drawn in chunks of ``BLOCK_CHUNK`` from a generator seeded with
    ``(seed, chunk)``, so every probe (and both directions) of a block sees
    the same configuration no matter in which order probes are queried.
    """

    kind: ScheduleKind
    block_len: int = 1
    mode: Mode = Mode.BINARY
    n_elements: int = 1
    seed: int = 0
    hold_config: RisConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.hold_config is not None and self.hold_config.n != self.n_elements:
            raise ValueError("hold_config size does not match n_elements")

    def block_coeffs(self, blocks) -> np.ndarray:
        """Coefficient rows of the given ``random-per-block`` block indices."""
        blocks = np.asarray(blocks, dtype=np.int64)
        out = np.empty(blocks.shape + (self.n_elements,), dtype=_block_chunk(self.seed, 0, self.mode, self.n_elements).dtype)
        chunk = blocks // BLOCK_CHUNK
        for c in np.unique(chunk):
            sel = chunk == c
            out[sel] = _block_chunk(self.seed, int(c), self.mode, self.n_elements)[blocks[sel] % BLOCK_CHUNK]
        return out


BLOCK_CHUNK = 4096


@lru_cache(maxsize=4)
def _block_chunk(seed: int, chunk: int, mode: Mode, n: int) -> np.ndarray:
    table = random_coeff_matrix(mode, BLOCK_CHUNK, n, np.random.default_rng([seed, chunk]))
    table.flags.writeable = False
    return table


def schedule_config(schedule: RisSchedule, probe_index: int, direction: int, rng: Generator) -> RisConfig:
    """Configuration in force for one probe and direction.

    Only ``attacker-per-direction`` consumes ``rng`` (one fresh draw per call);
    the other kinds are functions of the schedule and probe index alone.
    """
    if probe_index < 0:
        raise ValueError("probe_index must be >= 0")
    if direction not in (FORWARD, REVERSE):
        raise ValueError("direction must be FORWARD (0) or REVERSE (1)")
    n = schedule.n_elements
    kind = schedule.kind
    block = probe_index // schedule.block_len
    if kind is ScheduleKind.HOLD:
        return schedule.hold_config or RisConfig.all_on(n, schedule.mode)
    if kind is ScheduleKind.ALTERNATING:
        return RisConfig.all_on(n) if block % 2 == 0 else RisConfig.all_off(n)
    if kind is ScheduleKind.ATTACKER:
        return random_config(schedule.mode, n, rng)
    return RisConfig.from_coeffs(schedule.mode, schedule.block_coeffs(block))

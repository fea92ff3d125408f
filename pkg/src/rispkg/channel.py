"""Statistical channel ensemble and RIS-involved channel gains.

The composite channel between two single-antenna terminals is the coherent
sum of the direct link and the cascaded path through the surface::

    h = sum_n c_n * h_ar[n] * h_rb[n, ut] + sum(direct taps)

Physical links are perfectly reciprocal; every asymmetry between the two
directions comes from noise or from the surface applying different
configurations in the two directions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.random import Generator

from .ris import RisConfig, reflection_coeffs

SUBCARRIER_SPACING_HZ = 15e3


class ConfigurationError(ValueError):
    pass


def hermitian_sqrt(cov: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Symmetric (Hermitian) square root of a PSD matrix.

    Raises :class:`ConfigurationError` if ``cov`` has an eigenvalue below
    ``-tol`` times its largest eigenvalue magnitude.
    """
    cov = np.asarray(cov)
    w, u = np.linalg.eigh(cov)
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    if w.min(initial=0.0) < -tol * scale:
        raise ConfigurationError(f"correlation matrix is not positive semi-definite (min eigenvalue {w.min():.3g})")
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def exp_correlation(n: int, rho: float, angle: float = 0.0) -> np.ndarray:
    """``rho**|i-j| * exp(1j*angle*(i-j))``, the exponential element model."""
    d = np.arange(n)[:, None] - np.arange(n)[None, :]
    return rho ** np.abs(d) * np.exp(1j * angle * d)


@dataclass(frozen=True)
class ChannelStats:
    """Ensemble description of all physical links.

    ``angle_ar`` and ``angle_rb`` set the per-element phase progression of the
    complex exponential correlation model (zero gives the real model), and
    ``elem_gain`` scales the Alice-RIS variance of each element. When
    ``gamma`` is set, realizations are rescaled so that the cascaded path
    carries that fraction of the total mean energy (unit total).
    """

    n_elements: int
    n_uts: int = 1
    var_ar: float = 1.0
    var_rb: tuple[float, ...] = (1.0,)
    var_direct: float = 0.0
    rho_ut: float = 0.0
    rho_elem: float = 0.0
    gamma: float | None = None
    multipath: tuple[tuple[int, float], ...] = ((0, 1.0),)
    ris_tap_index: int = 0
    angle_ar: float = 0.0
    angle_rb: tuple[float, ...] | None = None
    elem_gain: tuple[float, ...] | None = None
    var_re: float | None = None
    _norm_multipath: tuple[tuple[int, float], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, m = self.n_elements, self.n_uts
        if int(n) != n or n < 1:
            raise ConfigurationError("n_elements must be a positive integer")
        if int(m) != m or m < 1:
            raise ConfigurationError("n_uts must be a positive integer")
        var_rb = tuple(float(v) for v in np.atleast_1d(self.var_rb))
        object.__setattr__(self, "var_rb", var_rb)
        if len(var_rb) != m:
            raise ConfigurationError(f"var_rb needs {m} entries, got {len(var_rb)}")
        for name, v in [("var_ar", self.var_ar), ("var_direct", self.var_direct), *[("var_rb", v) for v in var_rb]]:
            if not math.isfinite(v) or v < 0:
                raise ConfigurationError(f"{name} must be finite and nonnegative")
        if self.var_ar <= 0 or min(var_rb) <= 0:
            raise ConfigurationError("var_ar and var_rb must be positive")
        if not 0.0 <= self.rho_ut < 1.0:
            raise ConfigurationError("rho_ut must lie in [0, 1)")
        if not 0.0 <= self.rho_elem < 1.0:
            raise ConfigurationError("rho_elem must lie in [0, 1)")
        if self.gamma is not None and not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError("gamma must lie in [0, 1]")
        if self.gamma is not None and self.gamma < 1.0 and self.var_direct == 0.0:
            raise ConfigurationError("gamma < 1 needs a direct link (var_direct > 0)")
        if self.angle_rb is None:
            object.__setattr__(self, "angle_rb", (0.0,) * m)
        else:
            object.__setattr__(self, "angle_rb", tuple(float(a) for a in self.angle_rb))
        if len(self.angle_rb) != m:
            raise ConfigurationError("angle_rb needs one entry per UT")
        if self.elem_gain is not None:
            g = tuple(float(x) for x in self.elem_gain)
            if len(g) != n or min(g) <= 0 or not all(map(math.isfinite, g)):
                raise ConfigurationError("elem_gain needs n_elements positive finite entries")
            object.__setattr__(self, "elem_gain", g)
        if not self.multipath:
            raise ConfigurationError("multipath profile must be nonempty")
        delays = [int(d) for d, _ in self.multipath]
        powers = np.array([float(p) for _, p in self.multipath])
        if any(d < 0 for d in delays) or any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigurationError("multipath delay indices must be nonnegative and strictly increasing")
        if np.any(powers <= 0) or not np.all(np.isfinite(powers)):
            raise ConfigurationError("multipath powers must be positive")
        powers = powers / powers.sum()
        object.__setattr__(self, "_norm_multipath", tuple(zip(delays, powers.tolist())))
        if int(self.ris_tap_index) != self.ris_tap_index or self.ris_tap_index < 0:
            raise ConfigurationError("ris_tap_index must be a nonnegative integer")
        if self.var_re is not None and self.var_re <= 0:
            raise ConfigurationError("var_re must be positive")
        # validates PSD-ness of the colouring matrices up front
        ut_coloring(self)

    @property
    def tap_delays(self) -> np.ndarray:
        return np.array([d for d, _ in self._norm_multipath], dtype=int)

    @property
    def tap_powers(self) -> np.ndarray:
        return np.array([p for _, p in self._norm_multipath])

    @property
    def gains(self) -> np.ndarray:
        return np.ones(self.n_elements) if self.elem_gain is None else np.array(self.elem_gain)


def ut_coloring(stats: ChannelStats) -> np.ndarray:
    """Symmetric square root of the M x M inter-UT correlation matrix."""
    m = stats.n_uts
    corr = np.full((m, m), stats.rho_ut) + (1.0 - stats.rho_ut) * np.eye(m)
    return hermitian_sqrt(corr).real


def ar_covariance(stats: ChannelStats) -> np.ndarray:
    """E[h_ar h_ar^H] before gamma calibration."""
    g = np.sqrt(stats.gains)
    return stats.var_ar * np.outer(g, g) * exp_correlation(stats.n_elements, stats.rho_elem, stats.angle_ar)


def rb_cross_covariance(stats: ChannelStats, m: int, mp: int) -> np.ndarray:
    """E[h_rb[:, m] h_rb[:, mp]^H] before gamma calibration."""
    s = ut_coloring(stats)
    n = stats.n_elements
    out = np.zeros((n, n), dtype=complex)
    for j in range(stats.n_uts):
        w = s[m, j] * s[mp, j]
        if w != 0.0:
            out += w * exp_correlation(n, stats.rho_elem, stats.angle_rb[j])
    return math.sqrt(stats.var_rb[m] * stats.var_rb[mp]) * out


def cascade_scale(stats: ChannelStats) -> np.ndarray:
    """Per-UT amplitude factor applied to h_rb by gamma calibration (ones if off)."""
    if stats.gamma is None:
        return np.ones(stats.n_uts)
    mean_ris = stats.var_ar * stats.gains.sum() * np.array(stats.var_rb)
    return np.sqrt(stats.gamma / mean_ris)


def direct_scale(stats: ChannelStats) -> float:
    if stats.gamma is None or stats.var_direct == 0.0:
        return 1.0
    return math.sqrt((1.0 - stats.gamma) / stats.var_direct)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One coherent draw of every physical link.

    ``h_direct`` holds one complex gain per multipath tap (aligned with
    ``stats.tap_delays``); ``h_eve_direct`` is Alice's direct link to Eve and
    ``h_eve_re`` the RIS-to-Eve link.
    """

    stats: ChannelStats
    h_ar: np.ndarray
    h_rb: np.ndarray
    h_direct: np.ndarray
    h_eve_direct: np.ndarray
    h_eve_re: np.ndarray

    def cascade_products(self, ut: int = 0) -> np.ndarray:
        return self.h_ar * self.h_rb[:, ut]

    def eve_products(self) -> np.ndarray:
        return self.h_ar * self.h_eve_re

    def scaled(self, ris: float = 1.0, direct: float = 1.0) -> "ChannelRealization":
        return ChannelRealization(
            self.stats,
            self.h_ar,
            self.h_rb * ris,
            self.h_direct * direct,
            self.h_eve_direct * direct,
            self.h_eve_re * ris,
        )


def _cn(rng: Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


@lru_cache(maxsize=64)
def _coloring_roots(stats: ChannelStats):
    n = stats.n_elements
    ar = hermitian_sqrt(ar_covariance(stats))
    rb = tuple(hermitian_sqrt(exp_correlation(n, stats.rho_elem, a)) for a in stats.angle_rb)
    eve = hermitian_sqrt(exp_correlation(n, stats.rho_elem))
    return ar, rb, eve


def draw_realization(stats: ChannelStats, rng: Generator) -> ChannelRealization:
    n, m = stats.n_elements, stats.n_uts
    root_ar, roots_rb, root_eve = _coloring_roots(stats)
    h_ar = root_ar @ _cn(rng, n)
    u = np.stack([roots_rb[j] @ _cn(rng, n) for j in range(m)], axis=1)
    h_rb = (u @ ut_coloring(stats).T) * np.sqrt(np.array(stats.var_rb))[None, :]
    h_rb = h_rb * cascade_scale(stats)[None, :]

    sd = math.sqrt(stats.var_direct) * direct_scale(stats)
    tap_sd = sd * np.sqrt(stats.tap_powers)
    h_direct = tap_sd * _cn(rng, tap_sd.size)
    h_eve_direct = tap_sd * _cn(rng, tap_sd.size)

    var_re = stats.var_rb[0] if stats.var_re is None else stats.var_re
    eve_sd = math.sqrt(var_re)
    if stats.gamma is not None:
        eve_sd = math.sqrt(stats.gamma / (stats.var_ar * stats.gains.sum()))
    h_eve_re = eve_sd * (root_eve @ _cn(rng, n))
    return ChannelRealization(stats, h_ar, h_rb, h_direct, h_eve_direct, h_eve_re)


def _check_cfg(real: ChannelRealization, coeffs: np.ndarray) -> None:
    if coeffs.shape[-1] != real.stats.n_elements:
        raise ConfigurationError(f"config has {coeffs.shape[-1]} coefficients, surface has {real.stats.n_elements}")


def ris_gain(real: ChannelRealization, cfg: RisConfig | np.ndarray, ut: int = 0) -> complex | np.ndarray:
    """Cascaded path alone. ``cfg`` may be a config or a (..., N) coefficient array."""
    if not 0 <= ut < real.stats.n_uts:
        raise IndexError(f"ut {ut} out of range for {real.stats.n_uts} UTs")
    coeffs = reflection_coeffs(cfg) if isinstance(cfg, RisConfig) else np.asarray(cfg)
    _check_cfg(real, coeffs)
    return coeffs @ real.cascade_products(ut)


def cascaded_gain(real: ChannelRealization, cfg: RisConfig | np.ndarray, ut: int = 0):
    """Narrowband composite gain: cascaded path plus the sum of direct taps."""
    return ris_gain(real, cfg, ut) + real.h_direct.sum()


def eve_gain(real: ChannelRealization, cfg: RisConfig | np.ndarray):
    """Narrowband composite gain from Alice to Eve."""
    coeffs = reflection_coeffs(cfg) if isinstance(cfg, RisConfig) else np.asarray(cfg)
    _check_cfg(real, coeffs)
    return coeffs @ real.eve_products() + real.h_eve_direct.sum()


def subcarriers_for(bandwidth_hz: float) -> int:
    return int(round(bandwidth_hz / SUBCARRIER_SPACING_HZ))


def frequency_response(direct_taps, delays, ris_path, ris_delay: float, n_subcarriers: int) -> np.ndarray:
    """Unitary-DFT CSI of a tap set plus one (possibly fractional-delay) RIS path.

    ``direct_taps`` is (..., L) and ``ris_path`` is broadcastable to (...);
    the result has shape (..., n_subcarriers).
    """
    k = np.arange(n_subcarriers)
    steer = np.exp(-2j * np.pi * np.outer(np.asarray(delays, dtype=float), k) / n_subcarriers)
    h = np.asarray(direct_taps) @ steer
    ris_steer = np.exp(-2j * np.pi * k * ris_delay / n_subcarriers)
    h = h + np.asarray(ris_path)[..., None] * ris_steer
    return h / math.sqrt(n_subcarriers)


def tapped_response(
    real: ChannelRealization,
    cfg: RisConfig | np.ndarray,
    bandwidth_hz: float,
    n_subcarriers: int | None = None,
    *,
    ut: int = 0,
    ris_delay: float | None = None,
) -> np.ndarray:
    """Per-subcarrier CSI of the wideband channel.

    Direct taps sit at their delay indices and the cascaded path at
    ``ris_delay`` (default ``stats.ris_tap_index``; a fractional value puts
    the path off the tap grid). ``n_subcarriers`` defaults to
    ``bandwidth_hz / 15 kHz``.
    """
    stats = real.stats
    if n_subcarriers is None:
        n_subcarriers = subcarriers_for(bandwidth_hz)
    if n_subcarriers < 1:
        raise ConfigurationError("n_subcarriers must be >= 1")
    delay = float(stats.ris_tap_index if ris_delay is None else ris_delay)
    delays = stats.tap_delays
    if delays.max() >= n_subcarriers or delay >= n_subcarriers:
        raise ConfigurationError("tap delay beyond the DFT length")
    if np.any(np.abs(delays - delay) < 1e-12):
        raise ConfigurationError(f"RIS path collides with a direct tap at delay {delay:g}")
    return frequency_response(real.h_direct, delays, ris_gain(real, cfg, ut), delay, n_subcarriers)


def impulse_response(csi: np.ndarray) -> np.ndarray:
    """Inverse of the unitary DFT used by :func:`tapped_response` (last axis)."""
    return np.fft.ifft(csi, axis=-1) * math.sqrt(csi.shape[-1])

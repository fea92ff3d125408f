"""Surface configuration selection for the multi-user sum secret key rate."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import golden

from .channel import ChannelStats
from .keyrate import cascade_kernels, direct_block, noise_var_for, rates_from_gain_cov, sum_secret_key_rate
from .ris import Mode, RisConfig


@dataclass(frozen=True)
class OptOptions:
    restarts: int = 8
    max_sweeps: int = 200
    tol: float = 1e-6
    grid: int = 64

    def __post_init__(self):
        if self.restarts < 1 or self.max_sweeps < 1 or self.grid < 1 or not self.tol > 0:
            raise ValueError("all OptOptions fields must be positive")


def element_variances(stats: ChannelStats) -> np.ndarray:
    """Per-element cascaded variance var_ar * g_n * Σ_m var_rb[m]."""
    return stats.var_ar * stats.gains * sum(stats.var_rb)


def onoff_select(stats: ChannelStats, k_on: int) -> RisConfig:
    """Switch on the ``k_on`` elements with the largest cascaded variance."""
    n = stats.n_elements
    if not 1 <= k_on <= n:
        raise ValueError(f"k_on must lie in [1, {n}]")
    # stable sort on the negated variances keeps the lowest index among ties
    order = np.argsort(-element_variances(stats), kind="stable")
    amps = np.zeros(n)
    amps[order[:k_on]] = 1.0
    return RisConfig(Mode.ONOFF, np.zeros(n), amps)


class _Objective:
    """Sum rate as a function of unit-modulus coefficients, with cached kernels."""

    def __init__(self, stats: ChannelStats, snr_db: float):
        self.k = cascade_kernels(stats)
        self.m = stats.n_uts
        self.nv = noise_var_for(stats, snr_db)
        self.direct = direct_block(stats)

    def gain_cov(self, c: np.ndarray) -> np.ndarray:
        return np.einsum("i,abij,j->ab", c, self.k, c.conj()) + self.direct

    def __call__(self, c: np.ndarray) -> float:
        r = rates_from_gain_cov(self.gain_cov(c), self.nv)
        if not math.isfinite(r):
            raise FloatingPointError("non-finite objective (noiseless SNR?)")
        return r

    def line(self, c: np.ndarray, n: int):
        """Objective along coordinate ``n`` as a vectorized function of its phase.

        With ``c_n = e^{jt}``, every quadratic form splits into
        ``Q_rest + K_nn + e^{jt} u + e^{-jt} v``.
        """
        k = self.k
        c0 = c.copy()
        c0[n] = 0.0
        rest = np.einsum("i,abij,j->ab", c0, k, c0.conj()) + self.direct
        knn = k[:, :, n, n]
        u = np.einsum("abj,j->ab", k[:, :, n, :], c0.conj())
        v = np.einsum("i,abi->ab", c0, k[:, :, :, n])

        def f(t):
            t = np.atleast_1d(t)
            e = np.exp(1j * t)[:, None, None]
            g = rest + knn + e * u + v / e
            return rates_from_gain_cov(g, self.nv)

        return f


def _ascend(obj: _Objective, phases: np.ndarray, opts: OptOptions) -> tuple[np.ndarray, float, list[float]]:
    """Cyclic coordinate ascent; returns phases, value and the per-sweep trace."""
    phases = phases.copy()
    c = np.exp(1j * phases)
    best = obj(c)
    trace = [best]
    grid = -np.pi + 2 * np.pi * np.arange(opts.grid) / opts.grid
    step = 2 * np.pi / opts.grid
    for _ in range(opts.max_sweeps):
        start = best
        for n in range(c.size):
            f = obj.line(c, n)
            vals = f(grid)
            i = int(np.argmax(vals))
            t, val = grid[i], vals[i]
            try:
                t_ref = golden(lambda x: -f(x)[0], brack=(t - step, t, t + step), tol=1e-5)
                v_ref = f(t_ref)[0]
                if v_ref > val:
                    t, val = t_ref, v_ref
            except ValueError:
                # flat neighbourhood: the grid point stands
                pass
            if val > best:
                phases[n] = (t + np.pi) % (2 * np.pi) - np.pi
                c[n] = np.exp(1j * phases[n])
                best = obj(c)
        trace.append(best)
        if best - start < opts.tol:
            break
    return phases, best, trace


def restart_seeds(n: int, restarts: int, seed: int) -> list[np.ndarray]:
    """Zero phases, one binary-phase draw, then uniform random draws."""
    rng = np.random.default_rng(seed)
    seeds = [np.zeros(n)]
    if restarts > 1:
        seeds.append(np.where(rng.integers(0, 2, n) == 1, np.pi, 0.0))
    while len(seeds) < restarts:
        seeds.append(rng.uniform(-np.pi, np.pi, n))
    return seeds


def optimize_phases(
    stats: ChannelStats,
    snr_db: float,
    opts: OptOptions = OptOptions(),
    *,
    seed: int = 0,
    workers: int = 1,
    return_traces: bool = False,
):
    """Multi-start cyclic coordinate ascent over continuous phases.

    Returns ``(config, achieved_rate)`` (plus the per-restart sweep traces
    when ``return_traces``). Ties between restarts go to the lowest index.
    """
    obj = _Objective(stats, snr_db)
    starts = restart_seeds(stats.n_elements, opts.restarts, seed)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda p: _ascend(obj, p, opts), starts))
    else:
        results = [_ascend(obj, p, opts) for p in starts]
    best = max(range(len(results)), key=lambda i: (results[i][1], -i))
    phases, rate, _ = results[best]
    cfg = RisConfig(Mode.CONTINUOUS, phases, np.ones(stats.n_elements))
    if return_traces:
        return cfg, rate, [r[2] for r in results]
    return cfg, rate


def random_average_rate(stats: ChannelStats, snr_db: float, draws: int, rng: np.random.Generator) -> float:
    """Sum rate averaged over uniformly random continuous-phase configurations."""
    obj = _Objective(stats, snr_db)
    c = np.exp(1j * rng.uniform(-np.pi, np.pi, (draws, stats.n_elements)))
    g = np.einsum("ti,abij,tj->tab", c, obj.k, c.conj()) + obj.direct
    return float(np.mean(rates_from_gain_cov(g, obj.nv)))


@dataclass(frozen=True)
class SumRateCurves:
    snr_db: np.ndarray
    optimized: np.ndarray
    random: np.ndarray
    onoff: np.ndarray


def sumrate_curves(
    stats: ChannelStats,
    snr_grid,
    *,
    k_on: int | None = None,
    random_draws: int = 100,
    opts: OptOptions = OptOptions(),
    seed: int = 0,
    workers: int = 1,
) -> SumRateCurves:
    """Rates of the three algorithms over an SNR grid.

    Each SNR point uses its own derived seed for the random baseline and for
    the optimizer restarts, so points may be computed in any order.
    """
    snrs = np.asarray(snr_grid, dtype=float)
    k_on = stats.n_elements // 2 if k_on is None else k_on
    onoff = onoff_select(stats, k_on)

    def point(i):
        s = snrs[i]
        rng = np.random.default_rng([seed, i])
        rnd = random_average_rate(stats, s, random_draws, rng)
        _, opt = optimize_phases(stats, s, opts, seed=int(rng.integers(2**63)))
        return opt, rnd, sum_secret_key_rate(stats, onoff, s)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(point, range(snrs.size)))
    else:
        rows = [point(i) for i in range(snrs.size)]
    opt, rnd, oo = (np.array(col) for col in zip(*rows))
    return SumRateCurves(snrs, opt, rnd, oo)


def horizontal_gap_db(snr_db, higher, lower) -> float:
    """Mean SNR shift (dB) by which ``lower`` trails ``higher`` at equal rate.

    For every point of ``lower`` whose rate lies inside the range of
    ``higher``, interpolate the SNR at which ``higher`` attains it. ``nan``
    if no point overlaps. ``higher`` must be increasing in SNR.
    """
    s = np.asarray(snr_db, dtype=float)
    hi = np.asarray(higher, dtype=float)
    lo = np.asarray(lower, dtype=float)
    if np.any(np.diff(hi) <= 0):
        raise ValueError("reference curve must be strictly increasing")
    inside = (lo >= hi[0]) & (lo <= hi[-1])
    if not inside.any():
        return math.nan
    return float(np.mean(s[inside] - np.interp(lo[inside], hi, s)))

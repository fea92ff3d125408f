"""Acceptance criteria 1-9, one test per criterion.

Each test records a single pass/fail line (shown in the pytest terminal
summary) with the measured values, the pinned tolerances and the runtime
against its budget.
"""
from __future__ import annotations

import time

import numpy as np

from rispkg.adversary import jamming_point, leakage_point
from rispkg.cli import EXIT_OK, parse_config, run_experiment
from rispkg.channel import ChannelStats
from rispkg.keygen import kgr
from rispkg.keyrate import cascade_kernels, gaussian_mi, ksg_mi, noise_var_for, rates_from_gain_cov
from rispkg.optimize import OptOptions, horizontal_gap_db, optimize_phases, sumrate_curves
from rispkg.randomness import run_all
from rispkg.scenarios import SUMRATE_SNR_GRID, multiuser_stats, random_key_bits, static_bdr, static_mi


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.s = time.perf_counter() - self.t0


def _within(x, target, tol):
    return abs(x - target) <= tol


def test_criterion_1_kgr_table(acceptance):
    expected = [250.00, 166.67, 125.00, 100.00]
    with Timer() as t:
        got = [kgr(l, 2e-3, 2e-3) for l in (1, 2, 3, 4)]
    ok = all(_within(g, e, 0.01) for g, e in zip(got, expected)) and t.s < 1.0
    detail = "KGR " + "/".join(f"{g:.2f}" for g in got) + f" bit/s (tol 0.01), {t.s:.3f}s < 1s"
    assert acceptance(1, ok, detail)


def test_criterion_2_static_bdr(acceptance):
    with Timer() as t:
        no_ris = {(s, l): static_bdr(False, s, l, 10_000, seed=2) for s in (5.0, 15.0, 30.0) for l in (1, 2, 3, 4)}
        at15 = [static_bdr(True, 15.0, l, 10_000, seed=2) for l in (1, 2, 3, 4)]
        l4 = {s: static_bdr(True, s, 4, 10_000, seed=3) for s in (20.0, 25.0, 30.0)}
    coin = all(_within(v, 0.5, 0.05) for v in no_ris.values())
    decreasing = all(b < a for a, b in zip(at15, at15[1:]))
    low = all(v < 0.15 for v in l4.values())
    ok = coin and decreasing and low and t.s < 10.0
    detail = (
        f"no RIS BDR in [{min(no_ris.values()):.3f}, {max(no_ris.values()):.3f}] (0.5 +- 0.05); "
        "15 dB L=1..4 " + "/".join(f"{v:.3f}" for v in at15) + " strictly decreasing; "
        "L=4 at 20/25/30 dB " + "/".join(f"{v:.3f}" for v in l4.values()) + f" < 0.15; {t.s:.1f}s < 10s"
    )
    assert acceptance(2, ok, detail)


def test_criterion_3_randomness(acceptance):
    with Timer() as t:
        runs = [run_all(random_key_bits(100_000, [2024, s]), alpha=0.01) for s in range(10)]
    passed = sum(all(r.passed for r in reps) for reps in runs)
    ok = passed >= 9 and t.s < 30.0
    worst = min(r.p_value for reps in runs for r in reps)
    assert acceptance(3, ok, f"{passed}/10 runs pass all five tests at alpha 0.01 (need 9), min p {worst:.3g}; {t.s:.1f}s < 30s")


def test_criterion_4_mutual_information(acceptance):
    with Timer() as t:
        ab, ae = static_mi(20.0, 10_000, seed=4)
        rng = np.random.default_rng(44)
        checks = []
        for rho in (0.0, 0.5, 0.9):
            x = rng.standard_normal(10_000)
            y = rho * x + np.sqrt(1 - rho**2) * rng.standard_normal(10_000)
            checks.append((rho, ksg_mi(x, y, 4), gaussian_mi(1.0, 1.0, rho)))
    ksg_ok = all(_within(est, truth, 0.05) for _, est, truth in checks)
    ok = ab >= 0.3 and ae <= 0.05 and ksg_ok and t.s < 60.0
    detail = (
        f"MI(A;B) {ab:.3f} >= 0.3, MI(A;E) {ae:.3f} <= 0.05 at 20 dB; KSG vs closed form "
        + ", ".join(f"rho {r}: {e:.3f}/{c:.3f}" for r, e, c in checks)
        + f" (tol 0.05); {t.s:.1f}s < 60s"
    )
    assert acceptance(4, ok, detail)


def test_criterion_5_sum_rate_curves(acceptance):
    snr = np.array(SUMRATE_SNR_GRID)
    with Timer() as t:
        curves = {rho: sumrate_curves(multiuser_stats(rho), snr, k_on=8, random_draws=100, opts=OptOptions(restarts=8), seed=1) for rho in (0.0, 0.5)}
    band = (snr >= -5) & (snr <= 25)
    ordering = all(
        np.all(c.optimized[band] >= c.random[band]) and np.all(c.random[band] >= c.onoff[band]) for c in curves.values()
    )
    ind, cor = curves[0.0], curves[0.5]
    reduces = all(np.all(getattr(cor, a)[band] < getattr(ind, a)[band]) for a in ("optimized", "random", "onoff"))
    gap_ind = horizontal_gap_db(snr, ind.optimized, ind.onoff)
    gap_cor = horizontal_gap_db(snr, cor.optimized, cor.onoff)
    loss = {a: horizontal_gap_db(snr, getattr(ind, a), getattr(cor, a)) for a in ("optimized", "random", "onoff")}
    targets = [(gap_ind, 7.0), (gap_cor, 4.0), (loss["optimized"], 5.0), (loss["random"], 2.0), (loss["onoff"], 4.0)]
    loose = all(_within(v, target, 3.0) for v, target in targets)
    ok = ordering and reduces and loose and t.s < 300.0
    detail = (
        f"(a) ordering {ordering}; (b) correlation reduces all {reduces}; "
        f"(c) gaps {gap_ind:.2f} dB (7+-3) / {gap_cor:.2f} dB (4+-3), losses opt/rand/onoff "
        f"{loss['optimized']:.2f}/{loss['random']:.2f}/{loss['onoff']:.2f} dB (5/2/4 +-3); {t.s:.0f}s < 300s"
    )
    assert acceptance(5, ok, detail)


def test_criterion_6_optimizer_oracle(acceptance):
    stats = ChannelStats(2, n_uts=2, var_rb=(1.0, 0.3), rho_ut=0.5, rho_elem=0.9, angle_rb=(0.8, -0.8))
    snr = 10.0
    with Timer() as t:
        grid = np.deg2rad(np.arange(360) - 180)
        a, b = np.meshgrid(grid, grid, indexing="ij")
        c = np.stack([np.exp(1j * a.ravel()), np.exp(1j * b.ravel())], axis=1)
        g = np.einsum("ti,abij,tj->tab", c, cascade_kernels(stats), c.conj())
        brute = float(rates_from_gain_cov(g, noise_var_for(stats, snr)).max())
        _, rate = optimize_phases(stats, snr)
    ok = abs(rate - brute) < 1e-3 and t.s < 30.0
    assert acceptance(6, ok, f"optimized {rate:.6f} vs 360x360 grid {brute:.6f} (tol 1e-3); {t.s:.1f}s < 30s")


def test_criterion_7_jamming_and_ccs(acceptance):
    snrs = (20.0, 25.0, 30.0)
    with Timer() as t:
        rows = {
            (s, bw): {r.case: r for r in jamming_point(s, bw, 0.1, trials=4, n_rounds=256, seed=7)}
            for s in snrs
            for bw in (23.04e6, 7.68e6)
        }
    plateau = [rows[(s, 23.04e6)]["risj"].bdr_ab for s in snrs]
    restore = [rows[(s, 23.04e6)]["risj+ccs"].bdr_ab - rows[(s, 23.04e6)]["no-attack"].bdr_ab for s in snrs]
    extra = [rows[(s, 7.68e6)]["risj+ccs"].bdr_ab - rows[(s, 7.68e6)]["no-attack"].bdr_ab for s in snrs]
    kgr_hi = min(rows[(s, 23.04e6)]["risj+ccs"].kgr_bits_per_use for s in snrs)
    kgr_lo = min(rows[(s, 7.68e6)]["risj+ccs"].kgr_bits_per_use for s in snrs)
    ok = (
        all(_within(v, 0.2, 0.05) for v in plateau)
        and all(abs(d) <= 0.01 for d in restore)
        and all(d <= 0.05 for d in extra)
        and kgr_hi >= 35
        and kgr_lo >= 0.8 * kgr_hi
        and t.s < 180.0
    )
    detail = (
        "RISJ BDR " + "/".join(f"{v:.3f}" for v in plateau) + " at 20/25/30 dB (0.2 +- 0.05); "
        "CCS 23.04 MHz minus no-attack " + "/".join(f"{d:+.4f}" for d in restore) + " (|.| <= 0.01); "
        "7.68 MHz extra " + "/".join(f"{d:+.4f}" for d in extra) + " (<= 0.05); "
        f"bits/use {kgr_hi:.0f} (>= 35) and {kgr_lo:.0f} (>= 80%); {t.s:.0f}s < 180s"
    )
    assert acceptance(7, ok, detail)


def test_criterion_8_leakage_and_cdpp(acceptance):
    with Timer() as t:
        grid = {(g, s): {r.case: r for r in leakage_point(s, g, trials=20, n_rounds=500, seed=8)} for g in (0.1, 0.2, 0.5) for s in (0.0, 10.0, 20.0, 25.0)}
    leak = grid[(0.2, 10.0)]["risl-toggle"].bdr_ae
    eve = [grid[(g, s)]["risl-toggle+cdpp"].bdr_ae for g in (0.1, 0.2, 0.5) for s in (0.0, 10.0, 20.0)]
    legit = [grid[(g, 25.0)]["risl-toggle+cdpp"].bdr_ab for g in (0.1, 0.2, 0.5)]
    ok = leak <= 0.05 and all(_within(v, 0.5, 0.03) for v in eve) and all(v <= 0.1 for v in legit) and t.s < 120.0
    detail = (
        f"unprotected BDR(A,E) {leak:.4f} <= 0.05 at gamma 0.2, 10 dB; CDPP BDR(A,E) in "
        f"[{min(eve):.3f}, {max(eve):.3f}] (0.5 +- 0.03); BDR(A,B) at 25 dB "
        + "/".join(f"{v:.3f}" for v in legit) + f" <= 0.1; {t.s:.0f}s < 120s"
    )
    assert acceptance(8, ok, detail)


DETERMINISM_CONFIGS = [
    "[static-kgr-bdr]\nseed = 9\ntrials = 2\nL = 2\nsnr_db = 15\nn_bits = 2000\n",
    "[multiuser-sumrate]\nseed = 9\ntrials = 20\nsnr_db = 0, 10\nrestarts = 2\n",
    "[risj]\nseed = 9\ntrials = 1\nsnr_db = 20\nn_rounds = 64\n",
    "[risl]\nseed = 9\ntrials = 2\ngamma = 0.2\nsnr_db = 10\nn_rounds = 200\n",
    "[mi-estimate]\nseed = 9\ntrials = 2\nsnr_db = 20\nn_samples = 2000\n",
    "[randomness-audit]\nseed = 9\ntrials = 2\nn_bits = 20000\n",
]


def test_criterion_9_determinism(acceptance, tmp_path):
    same = []
    for text in DETERMINISM_CONFIGS:
        cfg = parse_config(text)
        outs = []
        for run in ("first", "second"):
            assert run_experiment(cfg, tmp_path / run) == EXIT_OK
            outs.append((tmp_path / run / f"{cfg.scenario}_{cfg.seed}.csv").read_bytes())
        same.append((cfg.scenario, outs[0] == outs[1]))
    ok = all(s for _, s in same)
    assert acceptance(9, ok, "byte-identical reruns: " + ", ".join(f"{n} {'yes' if s else 'NO'}" for n, s in same))

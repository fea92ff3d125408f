"""RIS jamming and leakage attacks, and the two countermeasures.

RISJ (jamming) breaks reciprocity by letting the surface apply different
configurations to the forward and reverse pilots, or drives the received
signal down with an oracle phase choice. CCS separates the channel into
taps and keys only from taps whose temporal behaviour is benign.

RISL (leakage) lets an eavesdropper predict the key, either from a known
on/off toggling pattern or by recomputing the cascaded gain. CDPP scrambles
the effective channel with a per-probe factor shared only by the
legitimate parties.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.random import Generator

from .channel import (
    ChannelRealization,
    ChannelStats,
    ConfigurationError,
    draw_realization,
    frequency_response,
    impulse_response,
    subcarriers_for,
)
from .keyrate import reference_power
from .keygen import BitString, bdr, cdf_quantize, cdf_quantize_columns, rss_threshold_quantize
from .probing import ProbeSession, add_noise, block_average, noise_variance
from .ris import Mode, random_coeff_matrix


class AttackKind(str, Enum):
    RISJ_DESYNC = "risj-desync"
    RISJ_ATTENUATE = "risj-attenuate"
    RISL_TOGGLE = "risl-toggle"
    RISL_SPECULATE = "risl-speculate"


class EveKnowledge(str, Enum):
    SCHEDULE_ONLY = "schedule-only"
    FULL_CSI = "full-csi"


@dataclass(frozen=True)
class AttackScenario:
    kind: AttackKind
    gamma: float
    eve_knowledge: EveKnowledge = EveKnowledge.SCHEDULE_ONLY

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "eve_knowledge", EveKnowledge(self.eve_knowledge))
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")

    def check(self, stats: ChannelStats) -> None:
        if stats.gamma is None or not math.isclose(stats.gamma, self.gamma, abs_tol=1e-12):
            raise ConfigurationError(f"scenario gamma {self.gamma} disagrees with channel gamma {stats.gamma}")


@dataclass(frozen=True)
class CcsParams:
    """Channel-separation settings.

    ``coherence_len`` is the number of consecutive snapshots over which the
    physical channel is static; temporal variance is pooled within those
    blocks so that ordinary fading does not read as an attack.
    """

    n_subcarriers: int
    variance_ratio_threshold: float = 5.0
    min_snapshots: int = 32
    coherence_len: int = 8

    def __post_init__(self):
        if self.n_subcarriers < 1 or self.min_snapshots < 1 or self.coherence_len < 2:
            raise ValueError("n_subcarriers and min_snapshots must be >= 1, coherence_len >= 2")
        if not self.variance_ratio_threshold > 1.0:
            raise ValueError("variance_ratio_threshold must exceed 1")


class NoCleanChannelError(RuntimeError):
    pass


# -------------------------------------------------------------------- RISJ

# Multipath profile of the wideband scenarios: 18 exponentially decaying
# taps (last tap 2% of the first), surface path well clear of the cluster.
WIDEBAND_TAPS = tuple((d, float(np.exp(-d * math.log(50) / 17))) for d in range(18))
WIDEBAND_RIS_TAP = 40
# bandwidth at which ``ris_tap_index`` is given; other bandwidths rescale the delay
REFERENCE_BANDWIDTH = 23.04e6


def wideband_stats(gamma: float, n_elements: int = 16, **kw) -> ChannelStats:
    kw.setdefault("multipath", WIDEBAND_TAPS)
    kw.setdefault("ris_tap_index", WIDEBAND_RIS_TAP)
    return ChannelStats(n_elements, var_direct=1.0, gamma=gamma, **kw)


def _ris_delay(stats: ChannelStats, bandwidth_hz: float) -> int:
    """Surface path delay in samples, rounded onto the tap grid.

    At coarser resolution the path can share a tap with a direct component.
    """
    return int(round(stats.ris_tap_index * bandwidth_hz / REFERENCE_BANDWIDTH))


def _wideband(real: ChannelRealization, coeffs: np.ndarray, delay: float, k: int, *, eve: bool = False):
    if eve:
        return frequency_response(real.h_eve_direct, real.stats.tap_delays, coeffs @ real.eve_products(), delay, k)
    return frequency_response(real.h_direct, real.stats.tap_delays, coeffs @ real.cascade_products(0), delay, k)


def run_risj(
    stats: ChannelStats,
    snr_db: float,
    n_rounds: int,
    rng: Generator,
    *,
    bandwidth_hz: float = 23.04e6,
    coherence_len: int = 8,
    attack: bool = True,
    mode: Mode = Mode.BINARY,
) -> ProbeSession:
    """Wideband sounding under the desynchronizing attacker.

    The physical channel is block fading (redrawn every ``coherence_len``
    snapshots). Under attack the surface draws independent configurations
    for the forward and reverse pilot of every snapshot; without attack it
    holds one configuration for the whole session.
    """
    if stats.gamma is None:
        raise ConfigurationError("run_risj needs gamma set in the channel statistics")
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    k = subcarriers_for(bandwidth_hz)
    delay = _ris_delay(stats, bandwidth_hz)
    if max(stats.tap_delays.max(), delay) >= k:
        raise ConfigurationError("tap delay beyond the DFT length")
    n = stats.n_elements
    if attack:
        table = random_coeff_matrix(mode, 2 * n_rounds, n, rng)
        fwd, rev = np.arange(0, 2 * n_rounds, 2), np.arange(1, 2 * n_rounds, 2)
    else:
        table = np.ones((1, n), dtype=np.int8)
        fwd = rev = np.zeros(n_rounds, dtype=np.int64)
    tb, ta, te = (np.empty((n_rounds, k), dtype=complex) for _ in range(3))
    for start in range(0, n_rounds, coherence_len):
        sl = slice(start, min(start + coherence_len, n_rounds))
        real = draw_realization(stats, rng)
        tb[sl] = _wideband(real, table[fwd[sl]], delay, k)
        ta[sl] = _wideband(real, table[rev[sl]], delay, k)
        te[sl] = _wideband(real, table[fwd[sl]], delay, k, eve=True)
    nv = noise_variance(np.concatenate([ta, tb]), snr_db)
    bob, alice, eve = add_noise(tb, nv, rng), add_noise(ta, nv, rng), add_noise(te, nv, rng)
    return ProbeSession(alice, bob, eve, table, fwd, rev, mode, float(snr_db), nv)


def _antiparallel(direct: np.ndarray, prods: np.ndarray, sweeps: int = 8) -> np.ndarray:
    """Unit-modulus phases minimizing |direct + Σ e^{jθ_n} p_n| per row.

    Starts from every element anti-parallel to the direct gain, then applies
    exact per-element minimization (anti-parallel to the rest of the sum).
    For a single element this is the scalar anti-alignment.
    """
    base = np.angle(direct)[:, None] + np.pi
    theta = base - np.angle(prods)
    c = np.exp(1j * theta)
    total = direct + np.sum(c * prods, axis=1)
    for _ in range(sweeps):
        for i in range(prods.shape[1]):
            rest = total - c[:, i] * prods[:, i]
            c[:, i] = np.exp(1j * (np.angle(-rest) - np.angle(prods[:, i])))
            total = rest + c[:, i] * prods[:, i]
    return c


def run_risj_attenuate(
    stats: ChannelStats,
    snr_db: float,
    rng: Generator,
    n_rounds: int = 4096,
    *,
    scenario: AttackScenario | None = None,
    attack: bool = True,
) -> ProbeSession:
    """Narrowband sounding under the oracle attenuation attacker.

    A fresh channel is drawn per probe. The attacker knows every gain and
    applies, in both directions, the continuous phases that minimize the
    received magnitude. The noise level is fixed by the nominal SNR of the
    unattacked channel (unit mean power under gamma calibration), so the
    effective SNR falls with the attack.
    """
    if scenario is not None:
        if scenario.eve_knowledge is not EveKnowledge.FULL_CSI:
            raise ValueError("the attenuation attacker needs full CSI")
        scenario.check(stats)
    n = stats.n_elements
    prods = np.empty((n_rounds, n), dtype=complex)
    direct = np.empty(n_rounds, dtype=complex)
    eve_prods = np.empty((n_rounds, n), dtype=complex)
    eve_direct = np.empty(n_rounds, dtype=complex)
    for t in range(n_rounds):
        real = draw_realization(stats, rng)
        prods[t] = real.cascade_products(0)
        direct[t] = real.h_direct.sum()
        eve_prods[t] = real.eve_products()
        eve_direct[t] = real.h_eve_direct.sum()
    c = _antiparallel(direct, prods) if attack else np.ones((n_rounds, n), dtype=complex)
    true = direct + np.sum(c * prods, axis=1)
    true_e = eve_direct + np.sum(c * eve_prods, axis=1)
    nv = 0.0 if snr_db == math.inf else reference_power(stats) / 10 ** (snr_db / 10)
    bob, alice, eve = add_noise(true, nv, rng), add_noise(true, nv, rng), add_noise(true_e, nv, rng)
    idx = np.arange(n_rounds)
    return ProbeSession(alice, bob, eve, c, idx, idx, Mode.CONTINUOUS, float(snr_db), nv)


@dataclass(frozen=True, eq=False)
class CcsResult:
    mask: np.ndarray
    bits_alice: np.ndarray
    bits_bob: np.ndarray
    retained_taps: np.ndarray
    statistic: np.ndarray

    @property
    def bits_per_use(self) -> int:
        """Two bits (real and imaginary part) per retained significant tap."""
        return 2 * int(self.retained_taps.size)

    def __iter__(self):
        return iter((self.mask, self.bits_alice, self.bits_bob))


def _within_block_variance(taps: np.ndarray, block: int) -> np.ndarray:
    nb = taps.shape[0] // block
    x = taps[: nb * block].reshape(nb, block, -1)
    return np.var(x, axis=1, ddof=1).mean(axis=0)


def ccs_defend(csi_alice: np.ndarray, csi_bob: np.ndarray, params: CcsParams) -> CcsResult:
    """Countermeasure by channel separation.

    Each party converts its snapshots to taps, pools the temporal variance of
    every tap within coherence blocks, and flags taps whose variance exceeds
    ``κ`` times the median tap variance; the union of both masks is zeroed
    and the cleaned response quantized per subcarrier (magnitude, CDF over
    snapshots). Retained significant taps are unflagged taps whose mean
    power exceeds ``κ`` times the median tap power.
    """
    a = np.asarray(csi_alice)
    b = np.asarray(csi_bob)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError("CSI arrays must share a (snapshots, subcarriers) shape")
    t, k = a.shape
    if k != params.n_subcarriers:
        raise ValueError(f"expected {params.n_subcarriers} subcarriers, got {k}")
    if t < max(params.min_snapshots, params.coherence_len):
        raise ValueError(f"need at least {max(params.min_snapshots, params.coherence_len)} snapshots, got {t}")
    kappa = params.variance_ratio_threshold
    taps_a, taps_b = impulse_response(a), impulse_response(b)
    stat_a = _within_block_variance(taps_a, params.coherence_len)
    stat_b = _within_block_variance(taps_b, params.coherence_len)
    flagged = (stat_a > kappa * np.median(stat_a)) | (stat_b > kappa * np.median(stat_b))
    if flagged.all():
        raise NoCleanChannelError("every tap flagged; no clean channel")
    keep = ~flagged
    clean_a = np.fft.fft(taps_a * keep, axis=1) / math.sqrt(k)
    clean_b = np.fft.fft(taps_b * keep, axis=1) / math.sqrt(k)
    power = 0.5 * (np.mean(np.abs(taps_a) ** 2, axis=0) + np.mean(np.abs(taps_b) ** 2, axis=0))
    significant = (power > kappa * np.median(power)) & keep
    return CcsResult(
        np.flatnonzero(flagged),
        cdf_quantize_columns(np.abs(clean_a)),
        cdf_quantize_columns(np.abs(clean_b)),
        np.flatnonzero(significant),
        np.maximum(stat_a, stat_b),
    )


def csi_bits(csi: np.ndarray) -> np.ndarray:
    """Magnitude bits per subcarrier, CDF threshold over snapshots."""
    return cdf_quantize_columns(np.abs(csi))


# -------------------------------------------------------------------- RISL


def _calibrate_instantaneous(real: ChannelRealization, gamma: float) -> ChannelRealization:
    """Rescale so the all-on surface path carries exactly ``gamma`` of the energy."""
    g = abs(np.sum(real.cascade_products(0))) ** 2
    d = float(np.sum(np.abs(real.h_direct) ** 2))
    ris = math.sqrt(gamma / g) if g > 0 else 0.0
    direct = math.sqrt((1.0 - gamma) / d) if d > 0 else 0.0
    return real.scaled(ris, direct)


def _private_factors(kind: str | None, n_blocks: int, rng: Generator) -> np.ndarray | None:
    if kind is None:
        return None
    if kind == "ones":
        return np.ones(n_blocks, dtype=complex)
    if kind == "gaussian":
        return (rng.standard_normal(n_blocks) + 1j * rng.standard_normal(n_blocks)) / math.sqrt(2)
    raise ValueError(f"unknown private factor kind {kind!r}")


@dataclass(frozen=True, eq=False)
class LeakageOutcome:
    """Session plus Eve's bit guesses; ``private`` is the CDPP factor per block."""

    session: ProbeSession
    eve_bits: BitString
    private: np.ndarray | None = None

    def __iter__(self):
        return iter((self.session, self.eve_bits))


def run_risl_toggle(
    stats: ChannelStats,
    snr_db: float,
    n_rounds: int,
    rng: Generator,
    *,
    l: int = 1,
    n_subcarriers: int = 256,
    private: str | None = None,
) -> LeakageOutcome:
    """Static channel, surface toggled all-on / all-off every ``l`` probes.

    Observations are wideband CSI with the surface path on its own tap; the
    realization is rescaled so the all-on path holds exactly ``gamma`` of
    the energy. Eve predicts bit 1 for on-blocks and 0 for off-blocks.
    ``private`` selects the CDPP factor (``None``, ``"ones"`` or
    ``"gaussian"``); it is drawn after the noise so that ``"ones"``
    reproduces the unprotected session exactly.
    """
    if stats.gamma is None:
        raise ConfigurationError("run_risl_toggle needs gamma set in the channel statistics")
    if n_rounds < 2 or l < 1:
        raise ValueError("need n_rounds >= 2 and l >= 1")
    real = _calibrate_instantaneous(draw_realization(stats, rng), stats.gamma)
    t = n_rounds * l
    block = np.arange(t) // l
    on = (block % 2 == 0)
    n = stats.n_elements
    table = np.stack([np.ones(n, dtype=np.int8), np.zeros(n, dtype=np.int8)])
    idx = (~on).astype(np.int64)
    delay = float(stats.ris_tap_index)
    true = _wideband(real, table[idx], delay, n_subcarriers)
    true_e = _wideband(real, table[idx], delay, n_subcarriers, eve=True)
    nv = noise_variance(true, snr_db)
    noise_b = add_noise(np.zeros_like(true), nv, rng)
    noise_a = add_noise(np.zeros_like(true), nv, rng)
    noise_e = add_noise(np.zeros_like(true), nv, rng)
    p = _private_factors(private, n_rounds, rng)
    scale = np.ones(t) if p is None else p[block]
    bob = scale[:, None] * true + noise_b
    alice = scale[:, None] * true + noise_a
    eve = true_e + noise_e
    session = ProbeSession(alice, bob, eve, table, idx, idx, Mode.ONOFF, float(snr_db), nv, l_oversample=l)
    eve_bits = BitString((np.arange(n_rounds) % 2 == 0).astype(np.uint8), "eve")
    return LeakageOutcome(session, eve_bits, p)


def run_risl_speculate(
    stats: ChannelStats,
    snr_db: float,
    n_rounds: int,
    rng: Generator,
    *,
    scenario: AttackScenario | None = None,
    l: int = 1,
    private: str | None = None,
) -> LeakageOutcome:
    """Static channel, random binary configuration every ``l`` probes.

    Eve knows the surface links and the configuration sequence, computes the
    cascaded gain of every block (without the direct link) and quantizes its
    magnitude with the legitimate CDF quantizer.
    """
    if scenario is not None:
        if scenario.eve_knowledge is not EveKnowledge.FULL_CSI:
            raise ValueError("speculation needs eve_knowledge = full-csi")
        scenario.check(stats)
    if n_rounds < 2 or l < 1:
        raise ValueError("need n_rounds >= 2 and l >= 1")
    real = draw_realization(stats, rng)
    n = stats.n_elements
    table = random_coeff_matrix(Mode.BINARY, n_rounds, n, rng)
    block = np.arange(n_rounds * l) // l
    ris = table.astype(complex) @ real.cascade_products(0)
    true = ris[block] + real.h_direct.sum()
    true_e = (table.astype(complex) @ real.eve_products())[block] + real.h_eve_direct.sum()
    nv = noise_variance(true, snr_db)
    noise_b = add_noise(np.zeros_like(true), nv, rng)
    noise_a = add_noise(np.zeros_like(true), nv, rng)
    noise_e = add_noise(np.zeros_like(true), nv, rng)
    p = _private_factors(private, n_rounds, rng)
    scale = np.ones(block.size) if p is None else p[block]
    session = ProbeSession(
        scale * true + noise_a, scale * true + noise_b, true_e + noise_e,
        table, block, block, Mode.BINARY, float(snr_db), nv, l_oversample=l,
    )
    return LeakageOutcome(session, cdf_quantize(np.abs(ris), "eve"), p)


def phase_series(x: np.ndarray) -> np.ndarray:
    return np.cos(np.angle(x))


def legit_bits(session: ProbeSession, quantizer: str, party: str = "alice") -> BitString:
    """Quantize one party's block-averaged observations.

    ``"rss"``: mean threshold on received power (wideband power summed over
    subcarriers); ``"magnitude"``: CDF of the magnitude; ``"real"``: CDF of
    the real part of subcarrier 0; ``"phase"``: CDF of the cosine of the
    phase of subcarrier 0. Under CDPP the phase is uniform whatever the
    channel magnitude, so the ``"phase"`` series carries nothing about the
    toggling pattern while its bits agree with the ``"real"`` ones.
    """
    x = block_average(getattr(session, party), session.l_oversample)
    if quantizer == "rss":
        amp = np.sqrt(np.sum(np.abs(x) ** 2, axis=1)) if x.ndim == 2 else np.abs(x)
        return rss_threshold_quantize(amp, party)
    ref = x[:, 0] if x.ndim == 2 else x
    if quantizer == "magnitude":
        return cdf_quantize(np.abs(ref), party)
    if quantizer == "real":
        return cdf_quantize(ref.real, party)
    if quantizer == "phase":
        return cdf_quantize(phase_series(ref), party)
    raise ValueError(f"unknown quantizer {quantizer!r}")


def cdpp_protect(
    stats: ChannelStats,
    snr_db: float,
    n_rounds: int,
    attack: AttackKind | str,
    rng: Generator,
    *,
    private: str = "gaussian",
    **kw,
) -> LeakageOutcome:
    """Run a leakage attack against sessions protected by dynamic private pilots.

    Every probe block's effective channel is multiplied by a private factor
    common to Alice and Bob; Eve's strategy runs unchanged. Pair with
    :func:`legit_bits` using the ``"phase"`` quantizer.
    """
    attack = AttackKind(attack)
    if attack is AttackKind.RISL_TOGGLE:
        return run_risl_toggle(stats, snr_db, n_rounds, rng, private=private, **kw)
    if attack is AttackKind.RISL_SPECULATE:
        return run_risl_speculate(stats, snr_db, n_rounds, rng, private=private, **kw)
    raise ValueError("CDPP protects against the leakage attacks only")


# ------------------------------------------------------------- evaluation

CSV_COLUMNS = ("snr_db", "gamma", "bdr_ab", "bdr_ae", "kgr_bits_per_use", "detection_rate", "false_alarm_rate")


@dataclass(frozen=True)
class AdversaryRow:
    case: str
    bandwidth_mhz: float
    snr_db: float
    gamma: float
    bdr_ab: float
    bdr_ae: float
    kgr_bits_per_use: float = math.nan
    detection_rate: float = math.nan
    false_alarm_rate: float = math.nan


def jamming_point(
    snr_db: float,
    bandwidth_hz: float,
    gamma: float = 0.1,
    *,
    trials: int = 4,
    n_rounds: int = 256,
    coherence_len: int = 8,
    seed: int = 0,
    n_elements: int = 16,
) -> list[AdversaryRow]:
    """No-attack, attack and attack-plus-CCS rows at one SNR and bandwidth."""
    stats = wideband_stats(gamma, n_elements)
    k = subcarriers_for(bandwidth_hz)
    params = CcsParams(k, coherence_len=coherence_len)
    acc = {c: [] for c in ("no-attack", "risj", "risj+ccs", "no-attack+ccs")}
    det, fa_clean, kgr_att, kgr_clean = [], [], [], []
    ris_tap = _ris_delay(stats, bandwidth_hz)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial, int(bandwidth_hz), int(round((snr_db + 1000.0) * 100))])
        clean = run_risj(stats, snr_db, n_rounds, rng, bandwidth_hz=bandwidth_hz, coherence_len=coherence_len, attack=False)
        att = run_risj(stats, snr_db, n_rounds, rng, bandwidth_hz=bandwidth_hz, coherence_len=coherence_len, attack=True)
        for case, s in (("no-attack", clean), ("risj", att)):
            ba = csi_bits(s.alice)
            acc[case].append((bdr(ba.ravel(), csi_bits(s.bob).ravel()), bdr(ba.ravel(), csi_bits(s.eve).ravel())))
        r_att = ccs_defend(att.alice, att.bob, params)
        r_clean = ccs_defend(clean.alice, clean.bob, params)
        eve_att = csi_bits(att.eve).ravel()
        acc["risj+ccs"].append((bdr(r_att.bits_alice.ravel(), r_att.bits_bob.ravel()), bdr(r_att.bits_alice.ravel(), eve_att)))
        acc["no-attack+ccs"].append(
            (bdr(r_clean.bits_alice.ravel(), r_clean.bits_bob.ravel()), bdr(r_clean.bits_alice.ravel(), csi_bits(clean.eve).ravel()))
        )
        det.append(bool(np.isin(ris_tap, r_att.mask)))
        fa_clean.append(r_clean.mask.size / k)
        kgr_att.append(r_att.bits_per_use)
        kgr_clean.append(r_clean.bits_per_use)
    mhz = bandwidth_hz / 1e6
    rows = []
    for case, vals in acc.items():
        ab, ae = np.mean(vals, axis=0)
        if case == "risj+ccs":
            rows.append(AdversaryRow(case, mhz, snr_db, gamma, ab, ae, float(np.mean(kgr_att)), float(np.mean(det)), math.nan))
        elif case == "no-attack+ccs":
            rows.append(AdversaryRow(case, mhz, snr_db, gamma, ab, ae, float(np.mean(kgr_clean)), math.nan, float(np.mean(fa_clean))))
        else:
            rows.append(AdversaryRow(case, mhz, snr_db, gamma, ab, ae))
    return rows


def leakage_point(
    snr_db: float,
    gamma: float,
    *,
    trials: int = 20,
    n_rounds: int = 500,
    seed: int = 0,
    n_elements: int = 16,
    multipath=((0, 1.0), (1, 0.5), (2, 0.25), (3, 0.125)),
    ris_tap_index: int = 8,
) -> list[AdversaryRow]:
    """Toggle-attack rows without and with CDPP at one (SNR, gamma)."""
    stats = ChannelStats(n_elements, var_direct=1.0, gamma=gamma, multipath=multipath, ris_tap_index=ris_tap_index)
    acc = {"risl-toggle": [], "risl-toggle+cdpp": []}
    for trial in range(trials):
        base = [seed, trial, int(round(gamma * 1000)), int(round((snr_db + 1000.0) * 100))]
        out = run_risl_toggle(stats, snr_db, n_rounds, np.random.default_rng(base))
        a, b = legit_bits(out.session, "rss"), legit_bits(out.session, "rss", "bob")
        acc["risl-toggle"].append((bdr(a, b), bdr(a, out.eve_bits)))
        out = cdpp_protect(stats, snr_db, n_rounds, AttackKind.RISL_TOGGLE, np.random.default_rng(base + [1]))
        a, b = legit_bits(out.session, "phase"), legit_bits(out.session, "phase", "bob")
        acc["risl-toggle+cdpp"].append((bdr(a, b), bdr(a, out.eve_bits)))
    return [AdversaryRow(case, math.nan, snr_db, gamma, *np.mean(v, axis=0)) for case, v in acc.items()]


def write_rows(rows, path) -> None:
    """CSV with ``case`` and ``bandwidth_mhz`` ahead of the standard columns."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("case", "bandwidth_mhz") + CSV_COLUMNS)
        for r in rows:
            w.writerow([r.case] + [f"{getattr(r, c):.6g}" for c in ("bandwidth_mhz",) + CSV_COLUMNS])

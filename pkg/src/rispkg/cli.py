"""Experiment runner: ``rispkg run <config> [--seed N] [--out DIR]`` and ``rispkg selftest``.

Configs are flat ``key = value`` files under one ``[scenario]`` header.
Each run writes ``<scenario>_<seed>.csv``; identical config and seed give a
byte-identical file.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adversary import CSV_COLUMNS, jamming_point, leakage_point
from .channel import ChannelRealization, ChannelStats, cascaded_gain
from .keygen import BitString, bdr, cdf_quantize, kgr, rss_threshold_quantize
from .keyrate import gaussian_mi
from .optimize import OptOptions, onoff_select, sumrate_curves
from .probing import block_average
from .randomness import monobit, run_all, runs
from .ris import Mode, RisConfig, reflection_coeffs
from .scenarios import multiuser_stats, random_key_bits, static_mi, static_run, static_stats

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


def _int(s: str) -> int:
    return int(s, 10)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(","))


COMMON = {"seed": (_int, None), "trials": (_int, None)}

# scenario -> key -> (parser, default); a default of None marks a required key
SCHEMAS: dict[str, dict] = {
    "static-kgr-bdr": {
        "L": (_int, 4),
        "t_probe_ms": (float, 2.0),
        "t_update_ms": (float, 2.0),
        "snr_db": (_floats, (15.0, 20.0)),
        "n_bits": (_int, 10000),
        "gamma": (float, 0.5),
        "n_elements": (_int, 128),
    },
    "multiuser-sumrate": {
        "n_elements": (_int, 16),
        "rho_ut": (_floats, (0.0, 0.5)),
        "rho_elem": (float, 0.8),
        "angle": (float, 0.8),
        "var_rb": (_floats, (1.0, 0.05)),
        "snr_db": (_floats, tuple(float(s) for s in range(-15, 40, 5))),
        "k_on": (_int, 0),
        "restarts": (_int, 8),
    },
    "risj": {
        "gamma": (float, 0.1),
        "snr_db": (_floats, (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
        "bandwidth_mhz": (_floats, (23.04, 7.68)),
        "n_rounds": (_int, 256),
        "coherence_len": (_int, 8),
        "n_elements": (_int, 16),
    },
    "risl": {
        "gamma": (_floats, (0.1, 0.2, 0.5)),
        "snr_db": (_floats, (0.0, 10.0, 20.0, 25.0)),
        "n_rounds": (_int, 500),
        "n_elements": (_int, 16),
    },
    "mi-estimate": {
        "snr_db": (_floats, (10.0, 20.0)),
        "n_samples": (_int, 10000),
        "k": (_int, 4),
    },
    "randomness-audit": {
        "n_bits": (_int, 100000),
        "snr_db": (float, 20.0),
        "alpha": (float, 0.01),
        "block_len": (_int, 128),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int
    trials: int
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]


def parse_config(text: str) -> ExperimentConfig:
    scenario = None
    seen: dict[str, int] = {}
    values: dict[str, object] = {}
    schema: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            if scenario is not None:
                raise ConfigError("only one scenario section is allowed", lineno)
            scenario = line[1:-1].strip()
            if scenario not in SCHEMAS:
                raise ConfigError(f"unknown scenario {scenario!r}", lineno)
            schema = {**COMMON, **SCHEMAS[scenario]}
            continue
        if scenario is None:
            raise ConfigError("key before the [scenario] header", lineno)
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for scenario {scenario}", lineno)
        seen[key] = lineno
        parser = schema[key][0]
        try:
            values[key] = parser(value)
        except ValueError:
            raise ConfigError(f"bad value {value!r} for key {key!r} (expected {parser.__name__.strip('_')})", lineno) from None
    if scenario is None:
        raise ConfigError("missing [scenario] header")
    for key, (_, default) in schema.items():
        if key not in values:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    seed, trials = values.pop("seed"), values.pop("trials")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer", seen["seed"])
    if trials < 1:
        raise ConfigError("trials must be positive", seen["trials"])
    return ExperimentConfig(scenario, seed, trials, values)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RIS_PKG_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    """Ordered map, concurrent when RIS_PKG_THREADS > 1."""
    items = list(items)
    n = _threads()
    if n == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(n) as ex:
        return list(ex.map(fn, items))


def _snr_key(snr_db: float) -> int:
    # seed words must be nonnegative
    return int(round((snr_db + 1000.0) * 100))


def _trial_rng(cfg: ExperimentConfig, *key) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, *key])


# ------------------------------------------------------------- scenarios


def _static_kgr_bdr(cfg):
    p = cfg.params
    with_ris = static_stats(True, p["gamma"], p["n_elements"])
    without = static_stats(False, n_elements=p["n_elements"])
    jobs = [(s, l, t) for s in p["snr_db"] for l in range(1, p["L"] + 1) for t in range(cfg.trials)]

    def job(j):
        s, l, t = j
        per = max(1, p["n_bits"] // cfg.trials)
        b1 = static_run(with_ris, s, l, per, _trial_rng(cfg, 0, l, t, _snr_key(s))).bdr_ab
        b0 = static_run(without, s, l, per, _trial_rng(cfg, 1, l, t, _snr_key(s))).bdr_ab
        return b1, b0

    res = dict(zip(jobs, _pmap(job, jobs)))
    header = ["snr_db", "L", "kgr_bits_per_s", "bdr_with_ris", "bdr_without_ris"]
    rows = []
    for s in p["snr_db"]:
        for l in range(1, p["L"] + 1):
            vals = np.array([res[(s, l, t)] for t in range(cfg.trials)])
            rate = kgr(l, p["t_probe_ms"] * 1e-3, p["t_update_ms"] * 1e-3)
            rows.append([_fmt(s), str(l), f"{rate:.2f}", _fmt(vals[:, 0].mean()), _fmt(vals[:, 1].mean())])
    return header, rows


def _multiuser_sumrate(cfg):
    p = cfg.params
    n = p["n_elements"]
    k_on = p["k_on"] or n // 2

    def job(rho):
        stats = multiuser_stats(rho, n_elements=n, rho_elem=p["rho_elem"], angle=p["angle"], var_rb=p["var_rb"])
        return sumrate_curves(
            stats, p["snr_db"], k_on=k_on, random_draws=cfg.trials,
            opts=OptOptions(restarts=p["restarts"]), seed=cfg.seed,
        )

    curves = _pmap(job, p["rho_ut"])
    header = ["rho_ut", "snr_db", "rate_random", "rate_onoff", "rate_optimized"]
    rows = []
    for rho, c in zip(p["rho_ut"], curves):
        for i, s in enumerate(c.snr_db):
            rows.append([_fmt(rho), _fmt(s), _fmt(c.random[i]), _fmt(c.onoff[i]), _fmt(c.optimized[i])])
    return header, rows


def _adversary_table(rows_):
    header = ["case", "bandwidth_mhz", *CSV_COLUMNS]
    rows = [[r.case] + [_fmt(getattr(r, c)) for c in header[1:]] for r in rows_]
    return header, rows


def _risj(cfg):
    p = cfg.params
    jobs = [(bw, s) for bw in p["bandwidth_mhz"] for s in p["snr_db"]]
    out = _pmap(
        lambda j: jamming_point(
            j[1], j[0] * 1e6, p["gamma"], trials=cfg.trials, n_rounds=p["n_rounds"],
            coherence_len=p["coherence_len"], seed=cfg.seed, n_elements=p["n_elements"],
        ),
        jobs,
    )
    return _adversary_table([r for rows in out for r in rows])


def _risl(cfg):
    p = cfg.params
    jobs = [(g, s) for g in p["gamma"] for s in p["snr_db"]]
    out = _pmap(
        lambda j: leakage_point(j[1], j[0], trials=cfg.trials, n_rounds=p["n_rounds"], seed=cfg.seed, n_elements=p["n_elements"]),
        jobs,
    )
    return _adversary_table([r for rows in out for r in rows])


def _mi_estimate(cfg):
    p = cfg.params
    jobs = [(s, t) for s in p["snr_db"] for t in range(cfg.trials)]
    out = _pmap(lambda j: static_mi(j[0], p["n_samples"], [cfg.seed, j[1], _snr_key(j[0])], p["k"]), jobs)
    header = ["snr_db", "trial", "mi_ab_bits", "mi_ae_bits"]
    return header, [[_fmt(s), str(t), _fmt(ab), _fmt(ae)] for (s, t), (ab, ae) in zip(jobs, out)]


def _randomness_audit(cfg):
    p = cfg.params

    def job(t):
        bits = random_key_bits(p["n_bits"], [cfg.seed, t], p["snr_db"])
        return run_all(bits, p["alpha"], p["block_len"])

    out = _pmap(job, range(cfg.trials))
    header = ["trial", "test", "n", "p", "pass"]
    rows = [[str(t), r.test_name, str(r.n_bits), _fmt(r.p_value), str(int(r.passed))] for t, reps in enumerate(out) for r in reps]
    return header, rows


RUNNERS = {
    "static-kgr-bdr": _static_kgr_bdr,
    "multiuser-sumrate": _multiuser_sumrate,
    "risj": _risj,
    "risl": _risl,
    "mi-estimate": _mi_estimate,
    "randomness-audit": _randomness_audit,
}


def run_experiment(cfg: ExperimentConfig, out_dir: str | os.PathLike = ".") -> int:
    """Run one scenario and write ``<scenario>_<seed>.csv``; returns an exit code."""
    try:
        header, rows = RUNNERS[cfg.scenario](cfg)
    except Exception as exc:  # reported, not raised: the CLI contract is an exit code
        print(f"error: {cfg.scenario} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.scenario}_{cfg.seed}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"{cfg.scenario}: {len(rows)} rows -> {path}")
    return EXIT_OK


# --------------------------------------------------------------- selftest


def _selftest_cases():
    def real2(h_ar, h_rb):
        st = ChannelStats(len(h_ar))
        return ChannelRealization(st, np.array(h_ar, complex), np.array(h_rb, complex)[:, None], np.zeros(1, complex), np.zeros(1, complex), np.zeros(len(h_ar), complex))

    yield "kgr table", [round(kgr(l, 2e-3, 2e-3), 2) for l in (1, 2, 3, 4)] == [250.0, 166.67, 125.0, 100.0]
    yield "cdf_quantize", str(cdf_quantize([1, 2, 3, 4])) == "0011"
    yield "rss quantize", str(rss_threshold_quantize(np.sqrt([0.1, 0.9, 0.1, 0.9]))) == "0101"
    yield "bdr", bdr(BitString.from_str("0110"), BitString.from_str("0111")) == 0.25
    yield "block_average", np.allclose(block_average([1, 1, 3, 3], 2), [1, 3])
    yield "binary coeffs", np.allclose(reflection_coeffs(RisConfig(Mode.BINARY, [0, np.pi], [1, 1])), [1, -1])
    yield "cascaded_gain", abs(cascaded_gain(real2([1, 1j], [1j, 1]), RisConfig(Mode.BINARY, [0, np.pi], [1, 1]))) < 1e-12
    yield "gaussian_mi", abs(gaussian_mi(1, 1, 0.5) - 0.2075) < 1e-4
    yield "onoff_select", list(onoff_select(ChannelStats(3, elem_gain=(3, 1, 2)), 2).amplitudes) == [1, 0, 1]
    yield "monobit vector", abs(monobit("1011010101", relaxed=True).p_value - 0.527089) < 1e-5
    yield "runs vector", abs(runs("1001101011", relaxed=True).p_value - 0.147232) < 1e-5


def selftest() -> int:
    failed = 0
    for name, ok in _selftest_cases():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        failed += not ok
    print(f"selftest: {failed} failure(s)")
    return EXIT_OK if failed == 0 else EXIT_RUNTIME


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rispkg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=".")
    sub.add_parser("selftest", help="run the built-in example checks")
    args = ap.parse_args(argv)
    if args.cmd == "selftest":
        return selftest()
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be a 64-bit unsigned integer")
            cfg = ExperimentConfig(cfg.scenario, args.seed, cfg.trials, cfg.params)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_experiment(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())

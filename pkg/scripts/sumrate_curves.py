"""Sum secret key rate of the optimized, random and on-off configurations
for independent and correlated UTs, with the horizontal SNR gaps."""
from __future__ import annotations

import argparse

import numpy as np

from rispkg.optimize import OptOptions, horizontal_gap_db, sumrate_curves
from rispkg.scenarios import SUMRATE_SNR_GRID, multiuser_stats

ALGS = ("optimized", "random", "onoff")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, nargs=2, default=[0.0, 0.5], metavar=("INDEP", "CORR"))
    ap.add_argument("--draws", type=int, default=100)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    snr = np.array(SUMRATE_SNR_GRID)
    curves = {
        rho: sumrate_curves(multiuser_stats(rho), snr, k_on=8, random_draws=args.draws, opts=OptOptions(restarts=args.restarts), seed=args.seed)
        for rho in args.rho
    }
    print(f"{'snr':>5} " + " ".join(f"{a[:5]}@{rho:<4}" for rho in args.rho for a in ALGS))
    for i, s in enumerate(snr):
        print(f"{s:>5.0f} " + " ".join(f"{getattr(curves[rho], a)[i]:>10.4f}" for rho in args.rho for a in ALGS))
    ind, cor = (curves[r] for r in args.rho)
    print(f"gap optimized vs on-off: {horizontal_gap_db(snr, ind.optimized, ind.onoff):.2f} dB (rho {args.rho[0]}), "
          f"{horizontal_gap_db(snr, cor.optimized, cor.onoff):.2f} dB (rho {args.rho[1]})")
    print("loss from correlation: " + ", ".join(f"{a} {horizontal_gap_db(snr, getattr(ind, a), getattr(cor, a)):.2f} dB" for a in ALGS))


if __name__ == "__main__":
    main()

"""BDR and CCS key rate under the desynchronizing surface attack at two bandwidths."""
from __future__ import annotations

import argparse

from rispkg.adversary import jamming_point


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr", type=float, nargs="+", default=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    ap.add_argument("--gamma", type=float, default=0.1)
    ap.add_argument("--trials", type=int, default=4)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    print(f"{'MHz':>6} {'snr':>4} {'no-attack':>9} {'risj':>6} {'risj+ccs':>8} {'bits/use':>8} {'detect':>6}")
    for bw in (23.04e6, 7.68e6):
        for s in args.snr:
            r = {x.case: x for x in jamming_point(s, bw, args.gamma, trials=args.trials, seed=args.seed)}
            ccs = r["risj+ccs"]
            print(f"{bw / 1e6:>6.2f} {s:>4.0f} {r['no-attack'].bdr_ab:>9.4f} {r['risj'].bdr_ab:>6.3f} "
                  f"{ccs.bdr_ab:>8.4f} {ccs.kgr_bits_per_use:>8.1f} {ccs.detection_rate:>6.2f}")


if __name__ == "__main__":
    main()

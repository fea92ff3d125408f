"""Eavesdropper BDR under the on/off toggle attack, unprotected and with private pilots."""
from __future__ import annotations

import argparse

from rispkg.adversary import leakage_point


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, nargs="+", default=[0.1, 0.2, 0.5])
    ap.add_argument("--snr", type=float, nargs="+", default=[0.0, 10.0, 20.0, 25.0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    print(f"{'gamma':>5} {'snr':>4} {'AB':>6} {'AE':>6} {'AB cdpp':>8} {'AE cdpp':>8}")
    for g in args.gamma:
        for s in args.snr:
            r = {x.case: x for x in leakage_point(s, g, trials=args.trials, seed=args.seed)}
            u, p = r["risl-toggle"], r["risl-toggle+cdpp"]
            print(f"{g:>5.2f} {s:>4.0f} {u.bdr_ab:>6.3f} {u.bdr_ae:>6.3f} {p.bdr_ab:>8.3f} {p.bdr_ae:>8.3f}")


if __name__ == "__main__":
    main()

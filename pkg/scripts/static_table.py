"""KGR and BDR against the oversampling factor L, with and without the surface."""
from __future__ import annotations

import argparse

from rispkg.keygen import kgr
from rispkg.scenarios import static_bdr


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr", type=float, nargs="+", default=[5.0, 15.0, 20.0, 25.0, 30.0])
    ap.add_argument("--bits", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print(f"{'L':>2} {'KGR bit/s':>10}  " + "  ".join(f"{s:>5.0f} dB RIS/none" for s in args.snr))
    for l in (1, 2, 3, 4):
        cells = [f"{static_bdr(True, s, l, args.bits, args.seed):.3f}/{static_bdr(False, s, l, args.bits, args.seed):.3f}" for s in args.snr]
        print(f"{l:>2} {kgr(l, 2e-3, 2e-3):>10.2f}  " + "  ".join(f"{c:>17}" for c in cells))


if __name__ == "__main__":
    main()

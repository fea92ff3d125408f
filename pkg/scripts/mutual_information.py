"""KSG estimates of Alice-Bob and Alice-Eve information in the static scenario."""
from __future__ import annotations

import argparse

from rispkg.scenarios import static_mi


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr", type=float, nargs="+", default=[0.0, 10.0, 20.0, 30.0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    print(f"{'snr':>4} {'I(A;B)':>8} {'I(A;E)':>8}  bits per observation")
    for s in args.snr:
        ab, ae = static_mi(s, args.samples, [args.seed, int(s * 100) + 100_000])
        print(f"{s:>4.0f} {ab:>8.3f} {ae:>8.3f}")


if __name__ == "__main__":
    main()

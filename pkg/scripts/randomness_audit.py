"""Five-test randomness audit of quantized key bits over independent seeds."""
from __future__ import annotations

import argparse

from rispkg.randomness import run_all
from rispkg.scenarios import random_key_bits


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--bits", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    passed = 0
    for s in range(args.runs):
        reps = run_all(random_key_bits(args.bits, [args.seed, s]))
        passed += all(r.passed for r in reps)
        print(f"run {s:>2}: " + "  ".join(f"{r.test_name} {r.p_value:.3f}" for r in reps))
    print(f"{passed}/{args.runs} runs pass all tests at alpha 0.01")


if __name__ == "__main__":
    main()

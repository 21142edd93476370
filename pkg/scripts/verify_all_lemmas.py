#!/usr/bin/env python3
"""Run every lemma-verification protocol at one or more delta levels."""

import argparse
import dataclasses
import sys
import time

from gpei.config import ExperimentConfig
from gpei.harness import LEMMA_IDS, verify_lemma, write_lemma_report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/lemmas")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--deltas", type=float, nargs="+", default=[0.05, 0.1])
    args = parser.parse_args()

    all_ok = True
    for delta in args.deltas:
        cfg = dataclasses.replace(ExperimentConfig(), seed=args.seed, delta=delta)
        for lemma in LEMMA_IDS:
            start = time.time()
            report = verify_lemma(lemma, cfg)
            write_lemma_report(f"{args.out}/delta_{delta}", report, cfg)
            print(f"delta={delta} {report.lines()[0]} ({time.time() - start:.1f}s)")
            all_ok &= report.passed
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())

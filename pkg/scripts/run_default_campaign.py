#!/usr/bin/env python3
"""Run the default desk-scale coverage campaign in all four flavors.

Produces one output directory per (noise, bound) combination under --out,
each holding per-trial trace CSVs, the aggregate coverage table, and a
pass/fail summary.  Everything is derived deterministically from --seed.
"""

import argparse
import dataclasses
import sys
import time

from gpei.config import ExperimentConfig
from gpei.harness import run_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/default_campaign")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    base = dataclasses.replace(ExperimentConfig(), seed=args.seed, trials=args.trials)
    all_ok = True
    for noise_sd in (0.05, 0.0):
        for theorem in ("thm42", "thm46"):
            cfg = dataclasses.replace(base, noise_sd=noise_sd, theorem=theorem)
            tag = f"{theorem}_{'noisy' if noise_sd > 0 else 'noiseless'}"
            start = time.time()
            result = run_experiment(cfg, f"{args.out}/{tag}", workers=args.workers)
            worst = min((row.holds_frequency for row in result.coverage), default=1.0)
            print(
                f"{tag}: {'PASS' if result.passed else 'FAIL'} "
                f"min_holds_frequency={worst:.3f} "
                f"variance_violations={result.variance_violations} "
                f"({time.time() - start:.1f}s)"
            )
            all_ok &= result.passed
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())

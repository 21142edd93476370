#!/usr/bin/env python3
"""Emit the data CSVs behind all five analysis figures into one directory."""

import argparse
import sys

from gpei.harness import FIGURE_IDS, emit_figure_data


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/figures")
    args = parser.parse_args()
    for fig in FIGURE_IDS:
        path = emit_figure_data(fig, f"{args.out}/{fig}.csv")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

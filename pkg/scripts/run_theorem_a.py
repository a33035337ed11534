#!/usr/bin/env python3
"""Two-range equidistribution experiment for Stark-Heegner cycles at p = 3.

Writes one stats CSV + summary per discriminant range so the convergence
can be plotted, and prints the comparison.
"""

import argparse
from pathlib import Path

from shcycles.cli import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--max-conductors", type=int, default=60)
    ap.add_argument("--out", default="results/theorem_a")
    ap.add_argument(
        "--ranges",
        default="1000:10000,10000:100000",
        help="comma-separated disc_p ranges lo:hi",
    )
    args = ap.parse_args()
    summaries = []
    for rng in args.ranges.split(","):
        lo, hi = (int(v) for v in rng.split(":"))
        out = Path(args.out) / f"{lo}_{hi}"
        cfg = ExperimentConfig(
            mode="stats",
            p=args.p,
            disc_min=lo,
            disc_max=hi,
            step=args.step,
            max_conductors=args.max_conductors,
            out=str(out),
        )
        summaries.append((lo, hi, run(cfg)))
    print("\ndisc_p range        TV(pooled)")
    for lo, hi, s in summaries:
        print(f"[{lo}, {hi}]".ljust(20) + f"{s['tv_pooled']:.6f}")


if __name__ == "__main__":
    main()

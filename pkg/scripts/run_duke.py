#!/usr/bin/env python3
"""Classical geodesic equidistribution over ranges of fundamental
discriminants: per-box masses against the hyperbolic measure."""

import argparse
from pathlib import Path

from shcycles.cli import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--max-discs", type=int, default=300)
    ap.add_argument("--out", default="results/duke")
    ap.add_argument("--ranges", default="100:200,1000:2000,10000:20000")
    args = ap.parse_args()
    for rng in args.ranges.split(","):
        lo, hi = (int(v) for v in rng.split(":"))
        cfg = ExperimentConfig(
            mode="duke",
            disc_min=lo,
            disc_max=hi,
            step=args.step,
            max_discs=args.max_discs,
            out=str(Path(args.out) / f"{lo}_{hi}"),
        )
        run(cfg)
        print()


if __name__ == "__main__":
    main()

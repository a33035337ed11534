#!/usr/bin/env python3
"""ATR cycles over Q(sqrt5): builds the bundled demo extensions, searches
their unit stabilizers, and prints the invariants."""

import argparse
import json
import tempfile
from pathlib import Path

from shcycles.cli import ExperimentConfig, run

DEMO = {
    "base": 5,
    "extensions": [
        {"delta": [2, -6], "form": [[2, 0], [0, 0], [-2, 6]], "bound": 16},
        {"delta": [6, -4], "form": [[2, 0], [2, 0], [-1, 1]], "bound": 16},
        {"delta": [2, -8], "form": [[2, 0], [2, 0], [0, 2]], "bound": 16},
    ],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="extension/form list (JSON); default: bundled demo")
    ap.add_argument("--out", default="results/atr")
    args = ap.parse_args()
    if args.config:
        cfg_path = args.config
    else:
        tmp = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
        json.dump(DEMO, tmp)
        tmp.close()
        cfg_path = tmp.name
    run(ExperimentConfig(mode="atr", atr_config=cfg_path, out=args.out))
    print(f"summary -> {Path(args.out) / 'summary.json'}")


if __name__ == "__main__":
    main()

"""Thin CLI: shcycles-plots <kind> <inputs...> --out FILE."""

import argparse
import sys

from .figures import SchemaError, render_class_bars, render_convergence, render_domain_scatter

KINDS = ("domain-scatter", "convergence", "class-bars")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="shcycles-plots", description=__doc__)
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("inputs", nargs="+", help="points CSV (scatter/bars) or stats CSVs (convergence)")
    ap.add_argument("--out", required=True, help="output image (extension picks the format)")
    args = ap.parse_args(argv)
    try:
        if args.kind == "domain-scatter":
            out = render_domain_scatter(args.inputs[0], args.out)
        elif args.kind == "class-bars":
            out = render_class_bars(args.inputs[0], args.out)
        else:
            out = render_convergence(args.inputs, args.out)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

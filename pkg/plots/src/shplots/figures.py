"""Figure rendering over the frozen shcycles CSV schemas.

Only the CSVs are consumed; no mathematics is recomputed here.  Files with
an unknown schema version are rejected loudly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

POINTS_SCHEMA = "points-v1"
STATS_SCHEMA = "stats-v1"

POINTS_HEADER = ["disc", "f", "p", "class_id", "t_index", "re_z", "im_z", "r_x", "r_y"]


class SchemaError(ValueError):
    """The input file does not carry the expected schema version."""


def _check_schema(line: str, expected: str, path) -> None:
    if line.strip() != f"# schema: {expected}":
        raise SchemaError(f"{path}: expected '# schema: {expected}', got {line.strip()!r}")


@dataclass
class PointsFile:
    p: int
    rows: list[dict]


def read_points(path) -> PointsFile:
    path = Path(path)
    with open(path) as fh:
        _check_schema(fh.readline(), POINTS_SCHEMA, path)
        reader = csv.DictReader(fh)
        if reader.fieldnames != POINTS_HEADER:
            raise SchemaError(f"{path}: unexpected header {reader.fieldnames}")
        rows = [
            {
                "class_id": int(r["class_id"]),
                "re_z": float(r["re_z"]),
                "im_z": float(r["im_z"]),
                "r": (int(r["r_x"]), int(r["r_y"])),
                "p": int(r["p"]),
            }
            for r in reader
        ]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return PointsFile(p=rows[0]["p"], rows=rows)


@dataclass
class StatsFile:
    meta: dict
    rows: list[dict]


def read_stats(path) -> StatsFile:
    path = Path(path)
    with open(path) as fh:
        _check_schema(fh.readline(), STATS_SCHEMA, path)
        meta_line = fh.readline().strip()
        if not meta_line.startswith("# meta:"):
            raise SchemaError(f"{path}: missing meta line")
        meta = {}
        for tok in meta_line.removeprefix("# meta:").split():
            k, _, v = tok.partition("=")
            meta[k] = v
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["kind", "key", "observed", "expected", "residual"]:
            raise SchemaError(f"{path}: unexpected header {reader.fieldnames}")
        rows = [
            {
                "kind": r["kind"],
                "key": r["key"],
                "observed": float(r["observed"]),
                "expected": float(r["expected"]),
                "residual": float(r["residual"]),
            }
            for r in reader
        ]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return StatsFile(meta=meta, rows=rows)


def _class_key(r: tuple[int, int], p: int) -> int:
    return r[0] * (p - 1) + (r[1] - 1)


def _domain_boundary(ax):
    xs = [x / 400 - 0.5 for x in range(401)]
    ax.plot(xs, [math.sqrt(max(0.0, 1 - x * x)) for x in xs], color="black", lw=1)
    top = ax.get_ylim()[1]
    ax.plot([-0.5, -0.5], [math.sqrt(0.75), top], color="black", lw=1)
    ax.plot([0.5, 0.5], [math.sqrt(0.75), top], color="black", lw=1)


def render_domain_scatter(points_path, out_path) -> Path:
    """Scatter of cycle points in the fundamental domain, colored by the
    residue class of the p-adic coordinate."""
    pf = read_points(points_path)
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.get_cmap("tab20")
    n_classes = pf.p * pf.p - pf.p
    for cls in sorted({row["r"] for row in pf.rows}, key=lambda r: _class_key(r, pf.p)):
        xs = [r["re_z"] for r in pf.rows if r["r"] == cls]
        ys = [r["im_z"] for r in pf.rows if r["r"] == cls]
        ax.scatter(
            xs, ys, s=6,
            color=cmap(_class_key(cls, pf.p) % 20),
            label=f"{cls[0]}+{cls[1]}a",
        )
    ax.set_ylim(bottom=0.8)
    _domain_boundary(ax)
    ax.set_xlim(-0.55, 0.55)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.legend(fontsize=6, ncol=2, title=f"{n_classes} classes")
    out = Path(out_path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_convergence(stats_paths, out_path) -> Path:
    """TV-to-uniform against the discriminant range midpoint, one marker
    per stats file; needs at least two files."""
    series = []
    for path in stats_paths:
        sf = read_stats(path)
        tv_rows = [r for r in sf.rows if r["kind"] == "tv"]
        if not tv_rows:
            raise SchemaError(f"{path}: no tv rows to plot")
        pooled = [r for r in tv_rows if r["key"] == "pooled"] or tv_rows
        mid = (float(sf.meta["disc_min"]) + float(sf.meta["disc_max"])) / 2
        series.append((mid, pooled[0]["observed"]))
    if len(series) < 2:
        raise SchemaError("convergence plot needs at least two stats files")
    series.sort()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([s[0] for s in series], [s[1] for s in series], marker="o")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("discriminant range midpoint")
    ax.set_ylabel("TV distance to uniform")
    out = Path(out_path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_class_bars(points_path, out_path) -> Path:
    """Occupancy of the residue classes over the base vertex, with the
    uniform expectation marked."""
    pf = read_points(points_path)
    p = pf.p
    classes = [(x, y) for x in range(p) for y in range(1, p)]
    counts = {c: 0 for c in classes}
    for row in pf.rows:
        counts[row["r"]] += 1
    total = len(pf.rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(
        range(len(classes)),
        [counts[c] / total for c in classes],
        color="steelblue",
    )
    ax.axhline(1 / len(classes), color="crimson", ls="--", label="uniform")
    ax.set_xticks(range(len(classes)))
    ax.set_xticklabels([f"{c[0]}+{c[1]}a" for c in classes], rotation=45, fontsize=7)
    ax.set_ylabel("frequency")
    ax.legend()
    out = Path(out_path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out

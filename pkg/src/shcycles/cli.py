"""Command-line surface tying the modules into reproducible experiments.

Modes: classgroup, embeddings, sh-cycles, duke, atr, stats.  All output is
deterministic (no randomness anywhere in the library; floats are printed
with fixed formats), so identical configurations give byte-identical
files.

Exit codes: 0 success, 1 invalid configuration, 2 violated mathematical
precondition (split prime, bad conductor, ...), 3 p-adic precision
exhaustion, 4 search-bound exhaustion.

CSV schemas (version field on the first line, frozen):

  points-v1: header ``disc,f,p,class_id,t_index,re_z,im_z,r_x,r_y``; one
  row per sample point, floats with 12 decimals.

  stats-v1:  header ``kind,key,observed,expected,residual`` after one
  ``# meta: ...`` line; rows kinds are box, class, tv, chi2.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .atr import (
    atr_cycle_from_form,
    atr_discriminant_norm,
    fixes_endpoints_exactly,
    make_base_field,
    make_extension,
    unit_stabilizer_search,
)
from .cycles import build_cycles, cycle_point_stream, toral_discriminant
from .embeddings import embedding_from_form, is_optimal
from .errors import PreconditionError, PrecisionError, SearchBoundExceeded
from .forms import narrow_class_group
from .orders import Order, field_from_discriminant
from .stats import (
    BoxPartition,
    default_partition,
    duke_geodesic_report,
    parse_boxes,
    residue_uniformity,
    sh_cycle_report,
    StatsReport,
)

POINTS_SCHEMA = "points-v1"
STATS_SCHEMA = "stats-v1"

MODES = ("classgroup", "embeddings", "sh-cycles", "duke", "atr", "stats")


@dataclass
class ExperimentConfig:
    mode: str
    dk: int | None = None
    f: int = 1
    p: int | None = None
    disc_min: int | None = None
    disc_max: int | None = None
    step: float = 0.01
    samples: int | None = None
    precision: int = 40
    boxes: str | None = None
    out: str = "results"
    max_conductors: int | None = None
    max_discs: int | None = None
    points_csv: str | None = None
    atr_config: str | None = None

    def partition(self) -> BoxPartition:
        return parse_boxes(self.boxes) if self.boxes else default_partition()


def _write_points_csv(path: Path, rows) -> int:
    n = 0
    with open(path, "w") as fh:
        fh.write(f"# schema: {POINTS_SCHEMA}\n")
        fh.write("disc,f,p,class_id,t_index,re_z,im_z,r_x,r_y\n")
        for disc, f, p, cid, k, z, r in rows:
            fh.write(
                f"{disc},{f},{p},{cid},{k},{z.real:.12f},{z.imag:.12f},{r[0]},{r[1]}\n"
            )
            n += 1
    return n


def _write_stats_csv(path: Path, report: StatsReport) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema: {STATS_SCHEMA}\n")
        meta = (
            f"kind={report.kind} disc_min={report.disc_min} disc_max={report.disc_max} "
            f"p={report.p or 0} n_samples={report.n_samples} n_units={report.n_units} "
            f"step={report.step:.6f}"
        )
        fh.write(f"# meta: {meta}\n")
        fh.write("kind,key,observed,expected,residual\n")
        for kind, key, obs, exp, res in report.csv_rows():
            fh.write(f"{kind},{key},{obs:.12f},{exp:.12f},{res:.12f}\n")


def _write_summary(path: Path, payload: dict) -> None:
    payload = {"schema": "summary-v1", **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_zf_element(field, spec):
    if not (isinstance(spec, (list, tuple)) and len(spec) == 2):
        raise PreconditionError(f"Z_F element spec must be [x, y], got {spec!r}")
    return field.element(int(spec[0]), int(spec[1]))


def run(config: ExperimentConfig) -> dict:
    runners = {
        "classgroup": _run_classgroup,
        "embeddings": _run_embeddings,
        "sh-cycles": _run_sh_cycles,
        "duke": _run_duke,
        "atr": _run_atr,
        "stats": _run_stats,
    }
    if config.mode not in runners:
        raise SystemExit(f"unknown mode {config.mode!r}")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return runners[config.mode](config, out)


def _require(config: ExperimentConfig, *names: str) -> None:
    for name in names:
        if getattr(config, name) is None:
            raise SystemExit(f"--{name.replace('_', '-')} is required for mode {config.mode}")


def _run_classgroup(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "dk")
    field = field_from_discriminant(config.dk)
    disc = config.f * config.f * field.d_K
    group = narrow_class_group(disc)
    payload = {
        "mode": "classgroup",
        "disc": disc,
        "order": group.order,
        "classes": [[q.a, q.b, q.c] for q in group.classes],
    }
    _write_summary(out / "summary.json", payload)
    print(f"Pic+ of discriminant {disc}: order {group.order}")
    for q in group.classes:
        print(f"  ({q.a}, {q.b}, {q.c})")
    return payload


def _run_embeddings(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "dk")
    field = field_from_discriminant(config.dk)
    disc = config.f * config.f * field.d_K
    group = narrow_class_group(disc)
    order = Order(field, config.f)
    entries = []
    for idx, rep in enumerate(group.classes):
        e = embedding_from_form(rep, field, config.f)
        entries.append(
            {
                "class_id": idx,
                "form": [rep.a, rep.b, rep.c],
                "W": [list(r) for r in e.W],
                "tau": e.tau(),
                "optimal": is_optimal(e, order, p=config.p),
            }
        )
    payload = {"mode": "embeddings", "disc": disc, "embeddings": entries}
    _write_summary(out / "summary.json", payload)
    print(f"{len(entries)} embedding classes of discriminant {disc}")
    for ent in entries:
        print(f"  class {ent['class_id']}: W rows {ent['W']}, tau = {ent['tau']:.6f}")
    return payload


def _run_sh_cycles(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "dk", "p")
    field = field_from_discriminant(config.dk)
    cycles = build_cycles(field, config.f, config.p, precision=config.precision)
    rows = []
    for cyc in cycles:
        M = config.samples or max(1, math.ceil(cyc.geodesic.L / config.step))
        for pt in cycle_point_stream(cyc, M):
            rows.append((cyc.disc_p, config.f, config.p, cyc.class_id, pt.t_index, pt.z, pt.r))
    n = _write_points_csv(out / "points.csv", rows)
    counts: dict[tuple[int, int], int] = {}
    for *_, r in rows:
        counts[r] = counts.get(r, 0) + 1
    payload = {
        "mode": "sh-cycles",
        "disc": cycles[0].disc_p,
        "f": config.f,
        "p": config.p,
        "cycles": len(cycles),
        "points": n,
        "period": cycles[0].geodesic.L,
        "toral_discriminant": toral_discriminant(field, config.f),
        "tv_residue": residue_uniformity(counts, config.p),
    }
    _write_summary(out / "summary.json", payload)
    print(
        f"{len(cycles)} cycle(s) of discriminant {payload['disc']} at p = {config.p}; "
        f"{n} points -> {out / 'points.csv'}"
    )
    print(f"residue TV to uniform: {payload['tv_residue']:.6f}")
    return payload


def _run_duke(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "disc_min", "disc_max")
    report = duke_geodesic_report(
        config.disc_min,
        config.disc_max,
        config.partition(),
        step=config.step,
        max_discs=config.max_discs,
    )
    _write_stats_csv(out / "stats.csv", report)
    payload = {"mode": "duke", **report.summary()}
    _write_summary(out / "summary.json", payload)
    print(
        f"duke: {report.n_units} geodesics, {report.n_samples} samples over "
        f"[{config.disc_min}, {config.disc_max}]"
    )
    for i, (o, e) in enumerate(zip(report.box_observed, report.box_expected)):
        print(f"  box {i}: observed {o:.5f}  expected {e:.5f}  residual {o - e:+.5f}")
    return payload


def _run_atr(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "atr_config")
    spec = json.loads(Path(config.atr_config).read_text())
    base = make_base_field(int(spec["base"]))
    results = []
    for ent in spec["extensions"]:
        delta = _parse_zf_element(base, ent["delta"])
        f = _parse_zf_element(base, ent["f"]) if "f" in ent else None
        ext = make_extension(base, delta, f)
        form = tuple(_parse_zf_element(base, coeff) for coeff in ent["form"])
        cycle = atr_cycle_from_form(form, ext)
        search = unit_stabilizer_search(ext, bound=int(ent.get("bound", 24)))
        u = search.unit
        m = cycle.psi_complex(u, 0)
        tau0 = cycle.tau0
        fix_err = abs((m[0][0] * tau0 + m[0][1]) / (m[1][0] * tau0 + m[1][1]) - tau0)
        norm, toral = atr_discriminant_norm(ext)
        results.append(
            {
                "delta": [str(delta.x), str(delta.y)],
                "omega_type": "half" if ext.t == 1 else "sqrt",
                "disc_norm": norm,
                "toral_discriminant": toral,
                "tau0": [tau0.real, tau0.imag],
                "endpoints": list(cycle.endpoints),
                "unit_x": [str(u.x.x), str(u.x.y)],
                "unit_y": [str(u.y.x), str(u.y.y)],
                "unit_norm_down_to_Q": int(abs(u.rel_norm().norm())),
                "translation_length": search.translation_length,
                "fixes_tau0_error": fix_err,
                "fixes_endpoints_exactly": fixes_endpoints_exactly(cycle, u),
            }
        )
    payload = {"mode": "atr", "base": spec["base"], "extensions": results}
    _write_summary(out / "summary.json", payload)
    for r in results:
        print(
            f"delta={r['delta']}: |N(disc)| = {r['disc_norm']}, toral = {r['toral_discriminant']}, "
            f"unit fixes tau0 to {r['fixes_tau0_error']:.2e}"
        )
    return payload


def _run_stats(config: ExperimentConfig, out: Path) -> dict:
    _require(config, "p", "disc_min", "disc_max")
    report = sh_cycle_report(
        config.p,
        config.disc_min,
        config.disc_max,
        config.partition(),
        step=config.step,
        max_conductors=config.max_conductors,
        precision=max(8, config.precision // 4),
    )
    _write_stats_csv(out / "stats.csv", report)
    payload = {"mode": "stats", **report.summary()}
    _write_summary(out / "summary.json", payload)
    print(
        f"stats: {report.n_units} conductors, {report.n_samples} samples, "
        f"TV(pooled) = {report.tv_pooled:.5f}, TV(raw) = {report.tv_residue:.5f}"
    )
    chi = report.chi2
    if chi is None:
        print("chi-square: thinned table too small, not reported")
    else:
        print(
            f"chi-square {chi.statistic:.2f} on {chi.dof} dof "
            f"({'below' if chi.below_threshold else 'ABOVE'} the 99.9% threshold {chi.threshold:.2f})"
        )
    return payload


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shcycles",
        description="Stark-Heegner / ATR cycle laboratory",
    )
    # defaults live on ExperimentConfig; flags default to None so that a
    # config file is only overridden by explicitly given flags
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--config", help="JSON file with the same keys as the flags")
    ap.add_argument("--dk", type=int, help="fundamental discriminant of the real quadratic field")
    ap.add_argument("--f", type=int, help="conductor (default 1)")
    ap.add_argument("--p", type=int, help="odd prime, inert in the field")
    ap.add_argument("--disc-min", dest="disc_min", type=int)
    ap.add_argument("--disc-max", dest="disc_max", type=int)
    ap.add_argument("--step", type=float, help="arc-length step (default 0.01)")
    ap.add_argument("--samples", type=int, help="per-cycle sample count (overrides --step)")
    ap.add_argument("--precision", type=int, help="p-adic digits (default 40)")
    ap.add_argument("--boxes", help="box partition 'x1:x2:y1:y2;...' (y2 may be inf)")
    ap.add_argument("--out", help="output directory (default results/)")
    ap.add_argument("--max-conductors", dest="max_conductors", type=int)
    ap.add_argument("--max-discs", dest="max_discs", type=int)
    ap.add_argument("--points-csv", dest="points_csv")
    ap.add_argument("--atr-config", dest="atr_config", help="JSON file with extensions/forms")
    return ap


def config_from_args(argv) -> ExperimentConfig:
    ns = build_parser().parse_args(argv)
    data = {k: v for k, v in vars(ns).items() if k != "config" and v is not None}
    if ns.config:
        file_data = json.loads(Path(ns.config).read_text())
        file_data.update(data)
        data = file_data
    if "mode" not in data:
        raise SystemExit("--mode is required (or provide it in --config)")
    if data["mode"] not in MODES:
        raise SystemExit(f"unknown mode {data['mode']!r}")
    defaults = ExperimentConfig(mode=data["mode"])
    for key in data:
        if not hasattr(defaults, key):
            raise SystemExit(f"unknown configuration key {key!r}")
    return ExperimentConfig(**{**asdict(defaults), **data})


def main(argv=None) -> int:
    try:
        config = config_from_args(sys.argv[1:] if argv is None else argv)
        run(config)
        return 0
    except SystemExit as e:
        if isinstance(e.code, int):
            return 1 if e.code not in (0, None) else 0
        print(f"error: {e}", file=sys.stderr)
        return 1
    except PreconditionError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return 2
    except PrecisionError as e:
        print(f"precision exhausted: {e}", file=sys.stderr)
        return 3
    except SearchBoundExceeded as e:
        print(f"search bound exhausted: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

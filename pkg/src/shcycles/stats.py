"""Empirical-measure diagnostics against the Haar limit.

The limit law on the canonical coordinates is the product of the
hyperbolic probability measure on the fundamental domain (total area
pi/3) and the uniform law on the p^2 - p residue classes: the fiber over
the base vertex is a single orbit of the integral p-adic projective group,
which acts through the finite projective group transitively on the
residue classes, so Haar pushes forward to the uniform distribution.

Box masses are exact ((3/pi) * (x2-x1) * (1/y1 - 1/y2)); residue-class
deviation is reported as total variation distance; the joint (box x class)
table is scored by a chi-square statistic against the product law, with
cells merged below an expected count of 5.  Geodesic samples at small arc
steps are serially correlated, so chi-square input is thinned to unit arc
spacing, which is recorded in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.stats import chi2 as _chi2

from .cycles import build_cycles, cycle_point_stream, eligible_conductors
from .embeddings import embedding_from_form
from .errors import PreconditionError
from .forms import narrow_class_group
from .hyperbolic import GeodesicWalker, geodesic_from_embedding
from .orders import field_from_discriminant, is_squarefree
from .tree import all_residue_classes

DEFAULT_STEP = 0.01
CHI2_THIN_ARC = 1.0   # arc-length spacing for decorrelated chi-square counts
CHI2_PERCENTILE = 0.999
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class Box:
    x1: float
    x2: float
    y1: float
    y2: float  # math.inf allowed

    def __post_init__(self):
        if not (-0.5 <= self.x1 < self.x2 <= 0.5):
            raise PreconditionError(f"box x-range [{self.x1}, {self.x2}] invalid")
        if not (1.0 <= self.y1 < self.y2):
            raise PreconditionError(f"box y-range [{self.y1}, {self.y2}] invalid")

    def contains(self, z: complex) -> bool:
        return self.x1 <= z.real < self.x2 and self.y1 <= z.imag < self.y2


@dataclass(frozen=True)
class BoxPartition:
    boxes: tuple[Box, ...]

    def __post_init__(self):
        bs = self.boxes
        if not bs:
            raise PreconditionError("partition needs at least one box")
        for i in range(len(bs)):
            for j in range(i + 1, len(bs)):
                a, b = bs[i], bs[j]
                if (
                    a.x1 < b.x2 and b.x1 < a.x2
                    and a.y1 < b.y2 and b.y1 < a.y2
                ):
                    raise PreconditionError(f"boxes {i} and {j} overlap")

    def classify(self, z: complex) -> int:
        """Index of the box containing z, or -1 for the rest cell."""
        for i, b in enumerate(self.boxes):
            if b.contains(z):
                return i
        return -1

    def masses(self) -> list[float]:
        return [hyperbolic_box_mass(b) for b in self.boxes]

    def rest_mass(self) -> float:
        return 1.0 - sum(self.masses())


def default_partition() -> BoxPartition:
    return BoxPartition(
        (
            Box(-0.5, 0.5, 1.0, 1.5),
            Box(-0.5, 0.5, 1.5, 2.5),
            Box(-0.5, 0.0, 2.5, math.inf),
            Box(0.0, 0.5, 2.5, math.inf),
        )
    )


def hyperbolic_box_mass(box: Box) -> float:
    """Mass of the box under the hyperbolic probability measure on the
    fundamental domain: (3/pi) * (x2 - x1) * (1/y1 - 1/y2)."""
    inv_y2 = 0.0 if math.isinf(box.y2) else 1.0 / box.y2
    return (3.0 / math.pi) * (box.x2 - box.x1) * (1.0 / box.y1 - inv_y2)


def residue_uniformity(counts: dict[tuple[int, int], int], p: int) -> float:
    """Total variation distance between the empirical class distribution
    and the uniform law on the p^2 - p classes."""
    n = sum(counts.values())
    if n == 0:
        raise PreconditionError("empty sample")
    target = 1.0 / (p * p - p)
    tv = 0.0
    for cls in all_residue_classes(p):
        tv += abs(counts.get(cls, 0) / n - target)
    return tv / 2.0


def residue_tv_from_freqs(freqs: dict[tuple[int, int], float], p: int) -> float:
    target = 1.0 / (p * p - p)
    return sum(abs(freqs.get(c, 0.0) - target) for c in all_residue_classes(p)) / 2.0


@dataclass
class ChiSquareResult:
    statistic: float
    dof: int
    threshold: float        # CHI2_PERCENTILE quantile of chi2(dof)
    n: int
    merged: int             # number of low-expectation cells pooled
    cells: list[tuple[str, float, float]] = field(default_factory=list)
    # (key, observed, expected) per retained cell; residual = obs - exp

    @property
    def below_threshold(self) -> bool:
        return self.statistic < self.threshold


def joint_independence(
    cell_counts: dict[tuple[int, tuple[int, int]], int],
    partition: BoxPartition,
    p: int,
) -> ChiSquareResult:
    """Chi-square of the (box x class) table against the product law
    mass(box) * uniform(class).  Cells keyed by (box index, class), box
    index -1 being the rest cell.  Cells with expected count below
    MIN_EXPECTED are pooled into one."""
    if not partition.boxes:
        raise PreconditionError("empty partition")
    n = sum(cell_counts.values())
    if n == 0:
        raise PreconditionError("empty sample")
    masses = partition.masses() + [partition.rest_mass()]
    class_p = 1.0 / (p * p - p)
    cells = []
    for bi, mass in zip(list(range(len(partition.boxes))) + [-1], masses):
        for cls in all_residue_classes(p):
            exp = n * mass * class_p
            obs = cell_counts.get((bi, cls), 0)
            cells.append((f"{bi}|{cls[0]}|{cls[1]}", obs, exp))
    big = [c for c in cells if c[2] >= MIN_EXPECTED]
    small = [c for c in cells if c[2] < MIN_EXPECTED]
    merged = 0
    if small:
        o = sum(c[1] for c in small)
        e = sum(c[2] for c in small)
        merged = len(small)
        if e > 0:
            big.append(("merged", o, e))
    if len(big) < 2:
        raise PreconditionError("sample too small: all cells merged away")
    stat = sum((o - e) ** 2 / e for _, o, e in big)
    dof = len(big) - 1
    return ChiSquareResult(
        statistic=stat,
        dof=dof,
        threshold=float(_chi2.ppf(CHI2_PERCENTILE, dof)),
        n=n,
        merged=merged,
        cells=big,
    )


@dataclass
class StatsReport:
    """Per-box and per-class comparison of an empirical sample with the
    product limit law, plus the scalar summaries used by the experiments."""

    kind: str
    disc_min: int
    disc_max: int
    p: int | None
    step: float
    n_samples: int
    n_units: int                       # geodesics or conductors pooled
    box_observed: list[float]
    box_expected: list[float]
    class_counts: dict[tuple[int, int], int] = field(default_factory=dict)
    tv_residue: float | None = None
    tv_pooled: float | None = None     # equal-weight-per-conductor pooling
    chi2: ChiSquareResult | None = None
    per_unit: list[dict] = field(default_factory=list)

    def box_residuals(self) -> list[float]:
        return [o - e for o, e in zip(self.box_observed, self.box_expected)]

    def csv_rows(self):
        for i, (o, e) in enumerate(zip(self.box_observed, self.box_expected)):
            yield ("box", str(i), o, e, o - e)
        n = sum(self.class_counts.values())
        if n and self.p:
            unif = 1.0 / (self.p * self.p - self.p)
            for cls, cnt in sorted(self.class_counts.items()):
                yield ("class", f"{cls[0]}|{cls[1]}", cnt / n, unif, cnt / n - unif)
        if self.tv_residue is not None:
            yield ("tv", "residue", self.tv_residue, 0.0, self.tv_residue)
        if self.tv_pooled is not None:
            yield ("tv", "pooled", self.tv_pooled, 0.0, self.tv_pooled)
        if self.chi2 is not None:
            for key, obs, exp in self.chi2.cells:
                yield ("cell", key, obs, exp, obs - exp)
            yield ("chi2", "joint", self.chi2.statistic, self.chi2.threshold,
                   self.chi2.statistic - self.chi2.threshold)

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "disc_min": self.disc_min,
            "disc_max": self.disc_max,
            "p": self.p,
            "step": self.step,
            "n_samples": self.n_samples,
            "n_units": self.n_units,
            "box_observed": self.box_observed,
            "box_expected": self.box_expected,
            "box_residuals": self.box_residuals(),
        }
        if self.tv_residue is not None:
            out["tv_residue"] = self.tv_residue
        if self.tv_pooled is not None:
            out["tv_pooled"] = self.tv_pooled
        if self.chi2 is not None:
            out["chi2"] = {
                "statistic": self.chi2.statistic,
                "dof": self.chi2.dof,
                "threshold": self.chi2.threshold,
                "below_threshold": self.chi2.below_threshold,
                "n": self.chi2.n,
                "merged_cells": self.chi2.merged,
            }
        if self.per_unit:
            out["per_unit"] = self.per_unit
        return out


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    out = []
    for d in range(max(lo, 5), hi + 1):
        if d % 4 == 1 and is_squarefree(d):
            out.append(d)
        elif d % 4 == 0:
            m = d // 4
            if m % 4 in (2, 3) and is_squarefree(m):
                out.append(d)
    return out


def _evenly_spaced(items: list, cap: int | None) -> list:
    if cap is None or len(items) <= cap:
        return items
    stride = len(items) / cap
    return [items[int(i * stride)] for i in range(cap)]


def duke_geodesic_report(
    disc_min: int,
    disc_max: int,
    partition: BoxPartition,
    step: float = DEFAULT_STEP,
    max_discs: int | None = None,
    repeats: int = 1,
) -> StatsReport:
    """Length-weighted pooling of arc-length samples over all geodesic
    classes of all fundamental discriminants in the range (one weight per
    unit of arc length, realized by per-cycle sample counts ceil(L/step)).

    ``repeats`` accumulates every cycle's sample multiset that many times;
    reported frequencies are count ratios, so they must not depend on it.
    """
    discs = fundamental_discriminants(disc_min, disc_max)
    if not discs:
        raise PreconditionError(f"no fundamental discriminants in [{disc_min}, {disc_max}]")
    discs = _evenly_spaced(discs, max_discs)
    box_counts = [0] * len(partition.boxes)
    rest = 0
    total = 0
    n_geodesics = 0
    for d in discs:
        fld = field_from_discriminant(d)
        group = narrow_class_group(d)
        for rep in group.classes:
            e = embedding_from_form(rep, fld, 1)
            geo = geodesic_from_embedding(e)
            M = max(1, math.ceil(geo.L / step))
            for _ in range(repeats):
                walker = GeodesicWalker(e, geo.L)
                for _, z, _, _ in walker.samples(M):
                    i = partition.classify(z)
                    if i >= 0:
                        box_counts[i] += 1
                    else:
                        rest += 1
                    total += 1
            n_geodesics += 1
    return StatsReport(
        kind="duke",
        disc_min=disc_min,
        disc_max=disc_max,
        p=None,
        step=step,
        n_samples=total,
        n_units=n_geodesics,
        box_observed=[c / total for c in box_counts],
        box_expected=partition.masses(),
    )


def sh_cycle_report(
    p: int,
    disc_min: int,
    disc_max: int,
    partition: BoxPartition,
    step: float = DEFAULT_STEP,
    max_conductors: int | None = None,
    precision: int = 24,
) -> StatsReport:
    """Equidistribution diagnostics for Stark-Heegner cycles pooled over the
    conductors with disc_p in range.

    Per conductor: equal weight per cycle, samples at arc step ``step``.
    Across conductors: the residue-class frequency vectors are pooled with
    equal conductor weights (tv_pooled); raw counts are also pooled
    (tv_residue, chi-square).  Chi-square counts are thinned to
    CHI2_THIN_ARC spacing to undo serial correlation along the flow.
    """
    pairs = eligible_conductors(p, disc_min, disc_max)
    if not pairs:
        raise PreconditionError(f"no eligible conductors in [{disc_min}, {disc_max}]")
    pairs = _evenly_spaced(pairs, max_conductors)
    thin = max(1, round(CHI2_THIN_ARC / step))
    box_counts = [0] * len(partition.boxes)
    rest = 0
    total = 0
    class_counts: dict[tuple[int, int], int] = {}
    cell_counts: dict[tuple[int, tuple[int, int]], int] = {}
    pooled_freqs: dict[tuple[int, int], float] = {}
    per_unit = []
    for d, f in pairs:
        fld = field_from_discriminant(d)
        cycles = build_cycles(fld, f, p, precision=precision)
        unit_counts: dict[tuple[int, int], int] = {}
        unit_n = 0
        for cyc in cycles:
            M = max(1, math.ceil(cyc.geodesic.L / step))
            for pt in cycle_point_stream(cyc, M):
                i = partition.classify(pt.z)
                if i >= 0:
                    box_counts[i] += 1
                else:
                    rest += 1
                total += 1
                class_counts[pt.r] = class_counts.get(pt.r, 0) + 1
                unit_counts[pt.r] = unit_counts.get(pt.r, 0) + 1
                unit_n += 1
                if pt.t_index % thin == 0:
                    key = (i, pt.r)
                    cell_counts[key] = cell_counts.get(key, 0) + 1
        for cls, cnt in unit_counts.items():
            pooled_freqs[cls] = pooled_freqs.get(cls, 0.0) + cnt / unit_n / len(pairs)
        per_unit.append(
            {
                "d_K": d,
                "f": f,
                "disc": f * f * d,
                "n": unit_n,
                "cycles": len(cycles),
                "tv": residue_uniformity(unit_counts, p),
            }
        )
    try:
        chi2_result = joint_independence(cell_counts, partition, p)
    except PreconditionError:
        chi2_result = None  # thinned table too small; reported as absent
    return StatsReport(
        kind="sh-cycles",
        disc_min=disc_min,
        disc_max=disc_max,
        p=p,
        step=step,
        n_samples=total,
        n_units=len(pairs),
        box_observed=[c / total for c in box_counts],
        box_expected=partition.masses(),
        class_counts=class_counts,
        tv_residue=residue_uniformity(class_counts, p),
        tv_pooled=residue_tv_from_freqs(pooled_freqs, p),
        chi2=chi2_result,
        per_unit=per_unit,
    )


def parse_boxes(spec: str) -> BoxPartition:
    """Parse "x1:x2:y1:y2;..." with y2 = inf allowed."""
    boxes = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        vals = [math.inf if v.strip() in ("inf", "oo") else float(v) for v in part.split(":")]
        if len(vals) != 4:
            raise PreconditionError(f"box spec {part!r} needs 4 fields")
        boxes.append(Box(*vals))
    if not boxes:
        raise PreconditionError("empty box spec")
    return BoxPartition(tuple(boxes))

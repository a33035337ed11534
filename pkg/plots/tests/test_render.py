from pathlib import Path

import pytest

from shplots.cli import main
from shplots.figures import (
    SchemaError,
    read_points,
    read_stats,
    render_class_bars,
    render_convergence,
    render_domain_scatter,
)

DATA = Path(__file__).parent / "data"
GOLDEN_POINTS = DATA / "points_golden.csv"
GOLDEN_STATS = [DATA / "stats_small.csv", DATA / "stats_large.csv"]
BAD_SCHEMA = DATA / "points_badschema.csv"


def test_read_points_golden():
    pf = read_points(GOLDEN_POINTS)
    assert pf.p == 3
    assert len(pf.rows) == 120
    assert all(1 <= r["r"][1] <= 2 for r in pf.rows)


def test_read_stats_golden():
    sf = read_stats(GOLDEN_STATS[0])
    assert sf.meta["p"] == "3"
    assert any(r["kind"] == "tv" for r in sf.rows)


def test_render_domain_scatter(tmp_path):
    out = render_domain_scatter(GOLDEN_POINTS, tmp_path / "scatter.png")
    assert out.exists() and out.stat().st_size > 0


def test_render_class_bars(tmp_path):
    out = render_class_bars(GOLDEN_POINTS, tmp_path / "bars.png")
    assert out.exists() and out.stat().st_size > 0


def test_render_convergence(tmp_path):
    out = render_convergence(GOLDEN_STATS, tmp_path / "conv.svg")
    assert out.exists() and out.stat().st_size > 0


def test_rejects_schema_bump(tmp_path):
    with pytest.raises(SchemaError):
        read_points(BAD_SCHEMA)
    with pytest.raises(SchemaError):
        render_domain_scatter(BAD_SCHEMA, tmp_path / "never.png")
    # and a stats file fed where points are expected
    with pytest.raises(SchemaError):
        read_points(GOLDEN_STATS[0])


def test_rendering_is_read_only(tmp_path):
    before = GOLDEN_POINTS.read_bytes()
    render_domain_scatter(GOLDEN_POINTS, tmp_path / "fig.png")
    assert GOLDEN_POINTS.read_bytes() == before


def test_cli_all_kinds(tmp_path):
    assert main(["domain-scatter", str(GOLDEN_POINTS), "--out", str(tmp_path / "a.png")]) == 0
    assert main(["class-bars", str(GOLDEN_POINTS), "--out", str(tmp_path / "b.png")]) == 0
    assert main(
        ["convergence", *map(str, GOLDEN_STATS), "--out", str(tmp_path / "c.png")]
    ) == 0


def test_cli_failures(tmp_path):
    assert main(["domain-scatter", str(BAD_SCHEMA), "--out", str(tmp_path / "x.png")]) == 2
    assert main(["domain-scatter", str(DATA / "missing.csv"), "--out", str(tmp_path / "y.png")]) == 1
    # convergence needs two inputs
    assert main(["convergence", str(GOLDEN_STATS[0]), "--out", str(tmp_path / "z.png")]) == 2

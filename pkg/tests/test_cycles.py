import math
import random

import pytest

from shcycles.cycles import (
    build_cycles,
    canonical_points,
    cycle_point_stream,
    eligible_conductors,
    toral_discriminant,
)
from shcycles.errors import PreconditionError
from shcycles.forms import picard_S
from shcycles.orders import Order, field_from_discriminant, make_field
from shcycles.padic import moebius_qp2
from shcycles.tree import all_residue_classes, base_vertex, reduce_point


def test_build_cycles_counts():
    assert len(build_cycles(make_field(5), 1, 3)) == 1
    assert len(build_cycles(make_field(3), 1, 5)) == 2
    assert len(build_cycles(make_field(10), 1, 7)) == 2


def test_build_cycles_rejects():
    with pytest.raises(PreconditionError):
        build_cycles(make_field(5), 1, 2)  # p = 2 unsupported
    with pytest.raises(PreconditionError):
        build_cycles(make_field(5), 1, 11)  # split
    with pytest.raises(PreconditionError):
        build_cycles(make_field(5), 3, 3)  # p | f


def test_tau_p_is_fixed_by_the_torus():
    for cyc in build_cycles(make_field(3), 1, 5) + build_cycles(make_field(5), 2, 3):
        m = cyc.embedding.psi_int(cyc.order.generator())
        moved = moebius_qp2(m, cyc.tau_p)
        diff_x = moved.x - cyc.tau_p.x
        diff_y = moved.y - cyc.tau_p.y
        assert diff_x.zero and diff_x.v >= 35
        assert diff_y.zero and diff_y.v >= 35


def test_tau_p_reduces_to_base_vertex():
    for cyc in build_cycles(make_field(5), 1, 3) + build_cycles(make_field(10), 1, 7):
        assert reduce_point(cyc.tau_p) == base_vertex(cyc.p)


def test_disc_p_and_toral_discriminant():
    cyc = build_cycles(make_field(5), 2, 3)[0]
    assert cyc.disc_p == 20
    assert toral_discriminant(make_field(5), 1) == 20
    assert toral_discriminant(make_field(5), 3) == 180
    # toral = 4 * disc_p when p does not divide f * d_K
    assert toral_discriminant(make_field(5), 2) == 4 * cyc.disc_p


def test_canonical_points_shapes_and_classes():
    cyc = build_cycles(make_field(5), 1, 3)[0]
    pts = canonical_points(cyc, 100)
    assert len(pts) == 100
    classes = set(all_residue_classes(3))
    for pt in pts:
        assert pt.r in classes
        assert abs(pt.z.real) <= 0.5 + 1e-9 and abs(pt.z) >= 1 - 1e-9


def test_fast_stream_matches_full_padic_route():
    for d, f, p in ((5, 1, 3), (12, 1, 5), (40, 1, 7), (5, 2, 3)):
        fld = field_from_discriminant(d)
        for cyc in build_cycles(fld, f, p):
            slow = canonical_points(cyc, 60)
            fast = list(cycle_point_stream(cyc, 60))
            for a, b in zip(slow, fast):
                assert abs(a.z - b.z) < 1e-12
                assert a.r == b.r


def test_canonical_points_invariant_under_perturbation():
    rng = random.Random(99)
    trials = 0
    cycles = build_cycles(make_field(5), 1, 3) + build_cycles(make_field(3), 1, 5)
    while trials < 60:
        cyc = rng.choice(cycles)
        M = rng.choice([17, 23, 31])
        base = canonical_points(cyc, M)
        # random SL2(Z) element stabilizing the base vertex
        g = ((1, 0), (0, 1))
        for _ in range(rng.randrange(1, 5)):
            n = rng.randrange(-2, 3)
            s = rng.choice([((1, n), (0, 1)), ((0, -1), (1, 0))])
            g = (
                (g[0][0] * s[0][0] + g[0][1] * s[1][0], g[0][0] * s[0][1] + g[0][1] * s[1][1]),
                (g[1][0] * s[0][0] + g[1][1] * s[1][0], g[1][0] * s[0][1] + g[1][1] * s[1][1]),
            )
        moved = canonical_points(cyc, M, perturb_sl2=g)
        for a, b in zip(base, moved):
            if a.boundary or b.boundary:
                continue
            assert abs(a.z - b.z) < 1e-9
            assert a.r == b.r
        trials += 1


def test_cycle_count_is_group_order_for_small_range():
    for d, f, p in [(5, 1, 3), (5, 1, 7), (8, 1, 3), (12, 1, 5), (13, 1, 5), (40, 1, 7), (5, 4, 3)]:
        fld = field_from_discriminant(d)
        cycles = build_cycles(fld, f, p)
        assert len(cycles) == picard_S(Order(fld, f), p).order
        assert len({c.class_rep for c in cycles}) == len(cycles)


def test_eligible_conductors():
    pairs = eligible_conductors(3, 20, 100)
    assert all(f % 3 != 0 for _, f in pairs)
    assert all(20 <= f * f * d <= 100 for d, f in pairs)
    assert (5, 2) in pairs and (29, 1) in pairs
    assert (13, 1) not in pairs  # 13 is a square mod 3
    discs = [f * f * d for d, f in pairs]
    assert discs == sorted(discs)

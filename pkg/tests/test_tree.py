import random
from fractions import Fraction

import pytest

from shcycles.errors import PreconditionError
from shcycles.padic import PadicNumber, Qp2Element, least_nonresidue, moebius_qp2
from shcycles.tree import (
    TreeVertex,
    act_on_vertex,
    all_residue_classes,
    ball_neighborhood,
    base_vertex,
    frac_mod_p_power,
    navigate_to_base,
    neighbors,
    reduce_point,
    residue_class,
    residue_class_count,
    to_dot,
)


def test_frac_mod_p_power():
    assert frac_mod_p_power(Fraction(17), 3, 2) == 8
    assert frac_mod_p_power(Fraction(-1), 3, 2) == 8
    assert frac_mod_p_power(Fraction(1, 2), 3, 1) == 2  # 1/2 = 2 mod 3
    assert frac_mod_p_power(Fraction(1, 3), 3, 1) == Fraction(1, 3)
    assert frac_mod_p_power(Fraction(9), 3, 2) == 0
    assert frac_mod_p_power(Fraction(5, 3), 3, 0) == Fraction(2, 3)


def test_vertex_equality_is_ball_equality():
    assert TreeVertex.make(3, 1, 5) == TreeVertex.make(3, 1, 2)
    assert TreeVertex.make(3, 2, 2) != TreeVertex.make(3, 2, 5)
    assert TreeVertex.make(3, 0, Fraction(1, 3)) != base_vertex(3)


def test_reduce_point_examples():
    p, u = 3, least_nonresidue(3)
    alpha = Qp2Element.alpha(p, u, 20)
    v = reduce_point(alpha)
    assert v == base_vertex(3) and v.parity == 0
    tau = Qp2Element.make(p, u, 2, 3, 20)
    v = reduce_point(tau)
    assert (v.n, v.x, v.parity) == (1, 2, 1)
    tau = Qp2Element.make(p, u, 0, Fraction(1, 3), 20)
    v = reduce_point(tau)
    assert (v.n, v.x, v.parity) == (-1, 0, 1)


def test_reduce_point_rejects_rational():
    p, u = 3, 2
    tau = Qp2Element.make(p, u, 5, 0, 20)
    with pytest.raises(PreconditionError):
        reduce_point(tau)


def test_act_examples():
    v0 = base_vertex(3)
    assert act_on_vertex(((1, 0), (0, 1)), v0) == v0
    assert act_on_vertex(((1, 0), (0, 3)), v0) == TreeVertex.make(3, -1, 0)
    v = TreeVertex.make(3, 2, 4)
    assert act_on_vertex(((1, 7), (0, 1)), v) == TreeVertex.make(3, 2, 11 % 9)


def test_navigate_examples():
    p = 5
    assert navigate_to_base(base_vertex(p)) == ((1, 0), (0, 1))
    v = TreeVertex.make(p, 2, 0)
    g = navigate_to_base(v)
    assert g == ((1, 0), (0, 25))
    assert act_on_vertex(g, v) == base_vertex(p)
    v = TreeVertex.make(p, 0, Fraction(1, 5))
    g = navigate_to_base(v)
    assert g == ((1, Fraction(-1, 5)), (0, 1))
    assert act_on_vertex(g, v) == base_vertex(p)


def test_navigator_determinant_positive_p_power():
    for p in (3, 5, 7):
        for n in (-2, -1, 0, 1, 3):
            v = TreeVertex.make(p, n, Fraction(7, p**2))
            g = navigate_to_base(v)
            det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
            assert det == Fraction(p) ** n and det > 0
            assert act_on_vertex(g, v) == base_vertex(p)


def _random_qp2(rng, p, u, prec=30):
    x = Fraction(rng.randrange(-50, 51), p ** rng.randrange(0, 3))
    y = Fraction(rng.randrange(-50, 51) or 1, p ** rng.randrange(0, 3))
    return Qp2Element.make(p, u, x, y, prec)


def _random_glq(rng, p):
    while True:
        ent = lambda: Fraction(rng.randrange(-9, 10), p ** rng.randrange(0, 2))
        g = ((ent(), ent()), (ent(), ent()))
        if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 0:
            return g


def test_equivariance_randomized():
    rng = random.Random(41)
    checked = 0
    while checked < 1500:
        p = rng.choice([3, 5, 7])
        u = least_nonresidue(p)
        tau = _random_qp2(rng, p, u)
        g = _random_glq(rng, p)
        try:
            lhs = reduce_point(moebius_qp2(g, tau))
        except Exception:
            continue
        rhs = act_on_vertex(g, reduce_point(tau))
        assert lhs == rhs
        checked += 1


def test_parity_flips_with_odd_valuation_of_det():
    rng = random.Random(4)
    from shcycles.padic import v_p

    for _ in range(1000):
        p = rng.choice([3, 5, 7])
        v = TreeVertex.make(p, rng.randrange(-2, 4), Fraction(rng.randrange(0, 40)))
        g = _random_glq(rng, p)
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        vdet = v_p(det.numerator, p) - v_p(det.denominator, p)
        w = act_on_vertex(g, v)
        assert (w.parity == v.parity) == (vdet % 2 == 0)


def test_residue_classes():
    p, u = 3, 2
    alpha = Qp2Element.alpha(p, u, 20)
    assert residue_class(alpha) == (0, 1)
    tau = Qp2Element.make(p, u, 1 + 3 * 4, 2 + 3 * 7, 20)
    assert residue_class(tau) == (1, 2)
    assert residue_class_count(3) == 6
    assert len(all_residue_classes(3)) == 6
    off = Qp2Element.make(p, u, 2, 3, 20)
    with pytest.raises(PreconditionError):
        residue_class(off)  # reduces to an odd vertex


def test_neighbors_and_dot():
    v0 = base_vertex(3)
    ns = neighbors(v0)
    assert len(ns) == 4 and len(set(ns)) == 4
    verts, edges = ball_neighborhood(3, 2)
    assert len(verts) == 1 + 4 + 4 * 3
    dot = to_dot(verts, edges)
    assert dot.startswith("graph") and dot.count("--") == len(edges)

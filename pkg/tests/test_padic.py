import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shcycles.errors import PreconditionError, PrecisionError
from shcycles.orders import make_field
from shcycles.padic import (
    PadicNumber,
    Qp2Element,
    embed_sqrt_dK,
    hensel_sqrt,
    least_nonresidue,
    moebius_qp2,
    tonelli_sqrt,
)

PRIMES = [3, 5, 7, 11, 13]


def rand_padic(rng, p, prec=20):
    if rng.random() < 0.1:
        return PadicNumber.zero_mod(p, prec)
    v = rng.randrange(-3, 4)
    unit = rng.randrange(1, p**6)
    while unit % p == 0:
        unit += 1
    return PadicNumber(p, v, unit % p**prec, prec)


def test_from_fraction_roundtrip():
    x = PadicNumber.from_fraction(Fraction(7, 45), 3, 12)
    # 45 = 9 * 5 so v = -2 and unit = 7 * inverse(5)
    assert x.v == -2
    assert (x.unit * 5) % 3**12 == 7 % 3**12


@pytest.mark.parametrize("p", PRIMES)
def test_ring_axioms_random(p):
    rng = random.Random(p)
    for _ in range(2000):
        a, b, c = (rand_padic(rng, p) for _ in range(3))
        k = min(a.abs_prec, b.abs_prec, c.abs_prec) - 4
        try:
            assert ((a + b) + c).agrees(a + (b + c), k)
            assert (a * (b + c)).agrees(a * b + a * c, k - 4)
            assert (a * b).agrees(b * a, k)
            assert (a + b).agrees(b + a, k)
        except PrecisionError:
            continue


def test_add_cancellation_tracks_precision():
    p = 5
    a = PadicNumber(p, 0, 1 + 5**6, 10)
    b = PadicNumber(p, 0, (-1) % 5**10, 10)
    s = a + b
    assert s.v == 6 and s.prec == 4


def test_precision_floor_raises():
    p = 5
    a = PadicNumber(p, 0, 1 + 5**9, 10)
    b = PadicNumber(p, 0, (-1) % 5**10, 10)
    with pytest.raises(PrecisionError):
        _ = a + b


def test_inverse():
    x = PadicNumber.from_fraction(Fraction(7, 2), 5, 14)
    assert (x * x.inverse()).agrees(PadicNumber.from_int(1, 5, 14), 12)
    with pytest.raises(ZeroDivisionError):
        PadicNumber.zero_mod(5, 10).inverse()


@pytest.mark.parametrize("p", [3, 5, 7, 13, 10007])
def test_tonelli(p):
    rng = random.Random(p)
    for _ in range(20):
        a = rng.randrange(1, p)
        sq = a * a % p
        r = tonelli_sqrt(sq, p)
        assert r * r % p == sq


def test_hensel_lift():
    c = hensel_sqrt(2, 7, 30)
    assert (c * c - 2) % 7**30 == 0


@pytest.mark.parametrize("p, u", [(3, 2), (5, 2), (7, 3), (11, 2), (13, 2)])
def test_least_nonresidue(p, u):
    assert least_nonresidue(p) == u


def test_galois_conjugation_is_ring_automorphism():
    rng = random.Random(23)
    p, u = 7, least_nonresidue(7)
    for _ in range(200):
        a = Qp2Element(p, u, rand_padic(rng, p), rand_padic(rng, p))
        b = Qp2Element(p, u, rand_padic(rng, p), rand_padic(rng, p))
        lhs = (a * b).conj()
        rhs = a.conj() * b.conj()
        k = min(lhs.x.abs_prec, rhs.x.abs_prec, lhs.y.abs_prec, rhs.y.abs_prec) - 2
        assert lhs.x.agrees(rhs.x, k) and lhs.y.agrees(rhs.y, k)
        s = (a + b).conj()
        t = a.conj() + b.conj()
        assert s.x.agrees(t.x) and s.y.agrees(t.y)


@pytest.mark.parametrize("p, d", [(3, 5), (7, 5), (3, 8), (7, 12), (11, 13), (5, 13)])
def test_embed_sqrt_squares_to_dK(p, d):
    fld = make_field(d) if d in (5, 13) else make_field(d // 4)
    s = embed_sqrt_dK(fld, p, 40)
    sq = s * s
    assert sq.y.zero
    assert sq.x.agrees(PadicNumber.from_int(fld.d_K, p, 40), 40)


def test_embed_sqrt_rejects():
    with pytest.raises(PreconditionError):
        embed_sqrt_dK(make_field(3), 3, 20)  # ramified
    with pytest.raises(PreconditionError):
        embed_sqrt_dK(make_field(5), 11, 20)  # split: 5 = 4^2 mod 11
    with pytest.raises(PreconditionError):
        embed_sqrt_dK(make_field(5), 2, 20)
    with pytest.raises(PreconditionError):
        embed_sqrt_dK(make_field(5), 3, 1)


def test_embed_sqrt_sign_is_canonical():
    s = embed_sqrt_dK(make_field(5), 3, 25)
    r = s.y.residue(1)
    assert r == min(r, 3 - r)


def test_moebius_examples():
    p, u = 3, 2
    alpha = Qp2Element.alpha(p, u, 25)
    t = moebius_qp2(((1, 0), (0, 1)), alpha)
    assert t.x.agrees(alpha.x) and t.y.agrees(alpha.y, 25)
    # [[y, x], [0, 1]] alpha = x + y*alpha
    t = moebius_qp2(((4, 7), (0, 1)), alpha)
    assert t.x.agrees(PadicNumber.from_int(7, p, 25), 25)
    assert t.y.agrees(PadicNumber.from_int(4, p, 25), 25)
    # inversion: 1/alpha = alpha/u
    t = moebius_qp2(((0, 1), (1, 0)), alpha)
    assert t.x.zero
    assert t.y.agrees(PadicNumber.from_fraction(Fraction(1, u), p, 25), 24)


def test_moebius_precision_loss_is_accounted():
    p, u = 3, 2
    alpha = Qp2Element.alpha(p, u, 6)
    # denominator with valuation 2 costs digits
    out = moebius_qp2(((1, 0), (0, 9)), alpha)
    assert out.y.v == -2

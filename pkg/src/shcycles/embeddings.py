"""Optimal embeddings of quadratic orders into M_2(Q) and the narrow
class group action on their conjugacy classes.

An embedding is stored through the trace-zero integer matrix
W = psi(f*omega_{K,0}), so W^2 = (f^2 d_K) * Id.  The full ring map is
psi((x + y*sqrt(d_K))/2) = (x*Id + y*W/f)/2.  The lattice
R^T = (Z + 2*M_2(Z)) intersected with the trace-zero matrices has basis
[[1,0],[0,-1]], [[0,2],[0,0]], [[0,0],[2,0]]; in those coordinates W reads
(b, c, -a) for the associated form (a, b, c), which makes optimality a gcd
condition and ties embedding classes to form classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .forms import (
    IDENTITY,
    Mat2,
    QForm,
    canonical_class_rep,
    compose,
    mat_mul,
)
from .orders import Order, QuadField, QuadElement

FracMat = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class Embedding:
    field: QuadField
    f: int
    W: Mat2

    def __post_init__(self):
        (w11, w12), (w21, w22) = self.W
        if w11 + w22 != 0:
            raise PreconditionError("W must have trace zero")
        if w12 % 2 or w21 % 2:
            raise PreconditionError("W must have even off-diagonal entries")
        disc = self.f * self.f * self.field.d_K
        if w11 * w11 + w12 * w21 != disc:
            raise PreconditionError(f"W^2 != {disc} * Id")

    @property
    def disc(self) -> int:
        return self.f * self.f * self.field.d_K

    def form(self) -> QForm:
        (w11, w12), (w21, _) = self.W
        return QForm(-w21 // 2, w11, w12 // 2)

    def psi(self, x: QuadElement) -> FracMat:
        """psi(x) as an exact rational matrix."""
        if x.d != self.field.d_K:
            raise PreconditionError("element of a different field")
        (w11, w12), (w21, w22) = self.W
        s = Fraction(x.y, self.f)
        half = Fraction(1, 2)
        return (
            ((x.x + s * w11) * half, s * w12 * half),
            (s * w21 * half, (x.x + s * w22) * half),
        )

    def psi_int(self, x: QuadElement) -> Mat2:
        """psi(x) as an integer matrix (raises if not integral)."""
        m = self.psi(x)
        out = []
        for row in m:
            for v in row:
                if v.denominator != 1:
                    raise PreconditionError(f"psi({x}) is not integral")
            out.append((int(row[0]), int(row[1])))
        return (out[0], out[1])

    def tau(self) -> float:
        """Fixed point with eigenvalue +f*sqrt(d_K): (-b - f*sqrt(d_K))/(2a)."""
        q = self.form()
        return (-q.b - self.f * self.field.sqrt_value()) / (2 * q.a)

    def tau_conj(self) -> float:
        q = self.form()
        return (-q.b + self.f * self.field.sqrt_value()) / (2 * q.a)

    def conjugate(self, g: Mat2) -> "Embedding":
        """g * psi * g^-1 for g in SL_2(Z); moves tau by the Moebius action."""
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        if det != 1:
            raise PreconditionError("conjugation is only by SL_2(Z) here")
        (a, b), (c, d) = g
        ginv = ((d, -b), (-c, a))
        W = mat_mul(mat_mul(g, self.W), ginv)
        return Embedding(self.field, self.f, W)


def embedding_from_form(q: QForm, field: QuadField, f: int) -> Embedding:
    if q.disc != f * f * field.d_K:
        raise PreconditionError(
            f"form discriminant {q.disc} != f^2 d_K = {f * f * field.d_K}"
        )
    if not q.is_primitive():
        raise PreconditionError(f"form {q} is not primitive")
    W = ((q.b, 2 * q.c), (-2 * q.a, -q.b))
    return Embedding(field, f, W)


def _prime_to_p(n: int, p: int | None) -> int:
    n = abs(n)
    if p is not None:
        while n and n % p == 0:
            n //= p
    return n


def _conductor_of(e: Embedding) -> int:
    """Conductor f' of {x in K : psi(x) integral}: the minimal g >= 1 with
    psi(g*omega_K) in M_2(Z).  Such g form a subgroup of Z containing
    2*e.f, so it suffices to scan divisors of 2*e.f."""
    omega = e.field.omega()
    cands = sorted(
        d for d in range(1, 2 * e.f + 1) if (2 * e.f) % d == 0
    )
    for g in cands:
        m = e.psi(g * omega)
        if all(v.denominator == 1 for row in m for v in row):
            return g
    raise AssertionError("psi(2f * omega) must be integral")  # unreachable


def _content_away_from_p(values, p: int | None) -> int | None:
    """Prime-to-p part of the gcd of rational values that are S-integral;
    None if some value has a denominator not supported at p.  Denominators
    that are p-powers are cleared first (they are S-units and do not affect
    primitivity)."""
    values = list(values)
    lcm_den = 1
    for v in values:
        if _prime_to_p(v.denominator, p) != 1:
            return None
        lcm_den = lcm_den * v.denominator // math.gcd(lcm_den, v.denominator)
    g = 0
    for v in values:
        g = math.gcd(g, int(v * lcm_den))
    return _prime_to_p(g, p) if g else 0


def optimality_criteria(e: Embedding, order: Order, p: int | None = None) -> dict[int, bool]:
    """The three equivalent optimality tests for O_f[S^-1], S = {oo} or
    {oo, p}, each on its own code path:

    1. the conductor of psi(K) meet M_2(Z[S^-1]) equals the order's,
    2. psi(f*omega_K) is integral and primitive in M_2(Z[S^-1]),
    3. psi(f*omega_{K,0}) is primitive in the trace-zero lattice R^T[S^-1].
    """
    if order.field != e.field:
        raise PreconditionError("order and embedding belong to different fields")
    f0 = order.f

    fprime = _conductor_of(e)
    crit1 = _prime_to_p(fprime, p) == _prime_to_p(f0, p)

    m = e.psi(f0 * e.field.omega())
    crit2 = _content_away_from_p((v for row in m for v in row), p) == 1

    # R^T coordinates of psi(f0 * omega_{K,0}) = (f0/f) * W
    scale = Fraction(f0, e.f)
    (w11, w12), (w21, _) = e.W
    coords = (scale * w11, scale * w12 / 2, scale * w21 / 2)
    crit3 = _content_away_from_p(coords, p) == 1

    return {1: crit1, 2: crit2, 3: crit3}


def is_optimal(e: Embedding, order: Order, p: int | None = None) -> bool:
    """Common verdict of the three criteria; a disagreement between them is
    an implementation bug and faults hard rather than being swallowed."""
    crits = optimality_criteria(e, order, p)
    if len(set(crits.values())) != 1:
        raise RuntimeError(f"optimality criteria disagree on {e} vs {order}: {crits}")
    return crits[1]


def embedding_class(e: Embedding) -> QForm:
    """Canonical form representing the PSL_2(Z)-conjugacy class of e."""
    return canonical_class_rep(e.form())


def star_action(t: QForm, e: Embedding) -> Embedding:
    """Class-group action through Gauss composition on the parametrizing
    forms.  The class of the output depends only on the classes of the
    inputs."""
    if t.disc != e.disc:
        raise PreconditionError(f"discriminant mismatch: {t.disc} vs {e.disc}")
    composed = compose(t, e.form())
    return embedding_from_form(canonical_class_rep(composed), e.field, e.f)


@dataclass(frozen=True)
class BruteForceClasses:
    classes: frozenset[QForm]
    complete: bool   # False if new classes still appear near the bound


def enumerate_classes_bruteforce(disc: int, coeff_bound: int = 50) -> BruteForceClasses:
    """Independent enumeration of embedding classes: all primitive
    trace-zero W in R^T with W^2 = disc * Id and |entries| <= coeff_bound,
    merged by conjugacy via canonical reduction of the associated forms.

    Every class contains a W with |entries| < 2*disc coming from a reduced
    form, so classes whose smallest found representative sits in the top
    shell flag the result incomplete.
    """
    if disc <= 0 or disc % 4 not in (0, 1) or math.isqrt(disc) ** 2 == disc:
        raise PreconditionError(f"invalid discriminant {disc}")
    first_height: dict[QForm, int] = {}
    for x in range(-coeff_bound, coeff_bound + 1):
        if (x - disc) % 2:
            continue
        rem = disc - x * x
        if rem % 4:
            continue
        yz = rem // 4
        if yz == 0:
            continue
        n = abs(yz)
        d = 1
        while d * d <= n:
            if n % d == 0:
                for yy in {d, n // d}:
                    for y in (yy, -yy):
                        z = yz // y
                        if max(abs(x), 2 * abs(y), 2 * abs(z)) > coeff_bound:
                            continue
                        if math.gcd(math.gcd(x, y), z) != 1:
                            continue
                        # W = ((x, 2y), (2z, -x)) ~ form (-z, x, y)
                        rep = canonical_class_rep(QForm(-z, x, y))
                        h = max(abs(x), 2 * abs(y), 2 * abs(z))
                        if rep not in first_height or h < first_height[rep]:
                            first_height[rep] = h
            d += 1
    complete = all(h <= coeff_bound - 2 for h in first_height.values())
    return BruteForceClasses(frozenset(first_height), complete)


def conjugating_word(e1: Embedding, e2: Embedding, max_len: int = 12) -> list[str] | None:
    """Secondary certificate: a word in S, T conjugating e1 to e2, found by
    breadth-first search; None if not found within max_len letters."""
    S: Mat2 = ((0, -1), (1, 0))
    T: Mat2 = ((1, 1), (0, 1))
    Tinv: Mat2 = ((1, -1), (0, 1))
    target = e2.W
    frontier: list[tuple[Mat2, list[str]]] = [(IDENTITY, [])]
    seen = {IDENTITY}
    for _ in range(max_len):
        nxt = []
        for g, word in frontier:
            for letter, gen in (("S", S), ("T", T), ("t", Tinv)):
                h = mat_mul(gen, g)
                if h in seen:
                    continue
                seen.add(h)
                if e1.conjugate(h).W == target:
                    return word + [letter]
                nxt.append((h, word + [letter]))
        frontier = nxt
    return None

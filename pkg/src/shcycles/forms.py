"""Primitive indefinite binary quadratic forms under composition.

Classes of primitive forms of discriminant f^2*d_K > 0 model the narrow
class group Pic+(O_f).  Reduction follows the classical rho operator on
indefinite forms; the canonical class representative is the
lexicographically least form with positive leading coefficient in the
reduction cycle (every cycle alternates the sign of a, so such forms
always exist and ties are impossible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, SearchBoundExceeded
from .orders import Order, kronecker

Mat2 = tuple[tuple[int, int], tuple[int, int]]

IDENTITY: Mat2 = ((1, 0), (0, 1))


def mat_mul(g: Mat2, h: Mat2) -> Mat2:
    (a, b), (c, d) = g
    (e, f), (x, y) = h
    return ((a * e + b * x, a * f + b * y), (c * e + d * x, c * f + d * y))


def mat_det(g: Mat2):
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def mat_inv_frac(g):
    """Exact inverse of a 2x2 matrix with rational entries."""
    (a, b), (c, d) = g
    det = Fraction(a) * d - Fraction(b) * c
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    return ((d / det, -Fraction(b) / det), (-Fraction(c) / det, a / det))


@dataclass(frozen=True, order=True)
class QForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def opposite(self) -> "QForm":
        return QForm(self.a, -self.b, self.c)

    def transform(self, g: Mat2) -> "QForm":
        """Right action q -> q o g for g in SL_2(Z)."""
        (p, q), (r, s) = g
        a = self.value(p, r)
        c = self.value(q, s)
        b = 2 * (self.a * p * q + self.c * r * s) + self.b * (p * s + q * r)
        return QForm(a, b, c)


def _validate_disc(disc: int) -> None:
    if disc <= 0:
        raise PreconditionError(f"discriminant must be positive, got {disc}")
    if disc % 4 not in (0, 1):
        raise PreconditionError(f"{disc} is not a discriminant (mod 4)")
    r = math.isqrt(disc)
    if r * r == disc:
        raise PreconditionError(f"discriminant must not be a square, got {disc}")


def principal_form(disc: int) -> QForm:
    _validate_disc(disc)
    t = disc % 2
    return QForm(1, t, (t - disc) // 4)


def is_reduced(q: QForm) -> bool:
    """0 < b < sqrt(disc) and sqrt(disc) - b < 2|a| < sqrt(disc) + b,
    checked with exact integer arithmetic."""
    disc = q.disc
    b, a2 = q.b, 2 * abs(q.a)
    if b <= 0 or b * b >= disc:
        return False
    if (a2 + b) ** 2 <= disc:  # sqrt(disc) - b < 2|a|
        return False
    if a2 > b and (a2 - b) ** 2 >= disc:  # 2|a| < sqrt(disc) + b
        return False
    return True


def _rho(q: QForm) -> tuple[QForm, int]:
    """One reduction step; returns (q o (S*T^m), m)."""
    disc = q.disc
    c = q.c
    ac = abs(c)
    if ac * ac >= disc:
        r = (-q.b) % (2 * ac)
        if r > ac:
            r -= 2 * ac
    else:
        sq = math.isqrt(disc)
        r = sq - ((sq + q.b) % (2 * ac))
    m = (q.b + r) // (2 * c)
    new = QForm(c, r, (r * r - disc) // (4 * c))
    return new, m


_CYCLE_KEY = lambda q: (q.a < 0, q.a, q.b, q.c)  # noqa: E731


def _step_matrix(m: int) -> Mat2:
    # S * T^m
    return ((0, -1), (1, m))


def reduce_form(q: QForm) -> tuple[QForm, Mat2, tuple[int, ...]]:
    """Canonical representative of q's reduction cycle, the SL_2(Z) matrix
    gamma with canonical = q o gamma, and the word of rho steps (each entry
    m stands for the factor S*T^m)."""
    _validate_disc(q.disc)
    if not q.is_primitive():
        raise PreconditionError(f"form {q} is not primitive")
    cur, gamma, word = q, IDENTITY, []
    for _ in range(10_000):
        if is_reduced(cur):
            break
        cur, m = _rho(cur)
        gamma = mat_mul(gamma, _step_matrix(m))
        word.append(m)
    else:
        raise SearchBoundExceeded("reduction did not terminate")
    best, best_gamma, best_word = cur, gamma, list(word)
    start = cur
    for _ in range(100_000):
        cur, m = _rho(cur)
        gamma = mat_mul(gamma, _step_matrix(m))
        word.append(m)
        if cur == start:
            break
        if _CYCLE_KEY(cur) < _CYCLE_KEY(best):
            best, best_gamma, best_word = cur, gamma, list(word)
    else:
        raise SearchBoundExceeded("reduction cycle did not close")
    return best, best_gamma, tuple(best_word)


def reduction_cycle(q: QForm) -> list[QForm]:
    """All reduced forms in q's class, in rho order from the canonical one."""
    start, _, _ = reduce_form(q)
    cycle = [start]
    cur, _ = _rho(start)
    while cur != start:
        cycle.append(cur)
        cur, _ = _rho(cur)
    return cycle


def canonical_class_rep(q: QForm) -> QForm:
    return reduce_form(q)[0]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    return old_r, old_s, old_t


def _represent_coprime(q: QForm, m: int) -> tuple[int, int, int]:
    """Primitive (x, y) with q(x, y) nonzero and coprime to m; deterministic
    scan by height.  Primitive forms represent values coprime to any modulus
    at tiny height, so the bound is generous."""
    for h in range(1, 200):
        for x in range(-h, h + 1):
            for y in (-h, h) if abs(x) < h else range(-h, h + 1):
                if math.gcd(x, y) != 1:
                    continue
                v = q.value(x, y)
                if v != 0 and math.gcd(v, m) == 1:
                    return x, y, v
    raise SearchBoundExceeded(f"no value of {q} coprime to {m} at height < 200")


def compose(q1: QForm, q2: QForm) -> QForm:
    """Gauss composition via Dirichlet's united-forms recipe: slide q2 to an
    equivalent form whose leading coefficient is coprime to a1, then glue
    the middle coefficients by CRT."""
    if q1.disc != q2.disc:
        raise PreconditionError(f"discriminant mismatch: {q1.disc} vs {q2.disc}")
    if not (q1.is_primitive() and q2.is_primitive()):
        raise PreconditionError("composition needs primitive forms")
    disc = q1.disc
    a1, b1 = q1.a, q1.b
    x, y, a2 = _represent_coprime(q2, 2 * a1)
    g, u0, v0 = _xgcd(x, y)
    if g < 0:
        g, u0, v0 = -g, -u0, -v0
    assert g == 1
    sl2 = ((x, -v0), (y, u0))  # det = x*u0 + y*v0 = 1
    q2t = q2.transform(sl2)
    assert q2t.a == a2
    b2 = q2t.b
    m = abs(a2)
    if m == 1:
        s = 0
    else:
        s = ((b2 - b1) // 2 % m) * pow(a1 % m, -1, m) % m
    B = b1 + 2 * a1 * s
    A = a1 * a2
    assert (B * B - disc) % (4 * A) == 0
    out = QForm(A, B, (B * B - disc) // (4 * A))
    assert out.is_primitive()
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def reduced_forms(disc: int) -> list[QForm]:
    """All primitive reduced forms of the given discriminant."""
    _validate_disc(disc)
    out = []
    for b in range(2 - disc % 2, math.isqrt(disc) + 1, 2):
        ac = (b * b - disc) // 4  # negative
        for d in _divisors(ac):
            for a in (d, -d):
                c = ac // a
                q = QForm(a, b, c)
                if is_reduced(q) and q.is_primitive():
                    out.append(q)
    return sorted(out)


class NarrowClassGroup:
    """Finite abelian group of form classes of one positive discriminant.

    Elements are canonical cycle representatives, sorted; composition is
    memoized.  ``s_prime`` records that the group is being used as
    Pic+(O_f[1/p]) for an inert prime p (the group itself is unchanged:
    the ideal (p) is totally positive and principal, so its class is
    trivial and the quotient collapses).
    """

    def __init__(self, disc: int, classes: tuple[QForm, ...], s_prime: int | None = None):
        self.disc = disc
        self.classes = classes
        self.s_prime = s_prime
        self._index = {q: i for i, q in enumerate(classes)}
        self._table: dict[tuple[int, int], int] = {}
        self._identity = self._index[canonical_class_rep(principal_form(disc))]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __eq__(self, other):
        return (
            isinstance(other, NarrowClassGroup)
            and self.disc == other.disc
            and self.classes == other.classes
        )

    @property
    def order(self) -> int:
        return len(self.classes)

    @property
    def identity_index(self) -> int:
        return self._identity

    def class_index(self, q: QForm) -> int:
        rep = canonical_class_rep(q)
        if rep not in self._index:
            raise PreconditionError(f"{q} does not have discriminant {self.disc}")
        return self._index[rep]

    def compose_indices(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._table:
            self._table[key] = self.class_index(compose(self.classes[i], self.classes[j]))
        return self._table[key]

    def inverse_index(self, i: int) -> int:
        return self.class_index(self.classes[i].opposite())


def narrow_class_group(disc: int) -> NarrowClassGroup:
    """Pic+(O) realized by reduction cycles of primitive forms."""
    forms = reduced_forms(disc)
    reps = []
    seen: set[QForm] = set()
    for q in forms:
        if q in seen:
            continue
        cycle = reduction_cycle(q)
        seen.update(cycle)
        reps.append(min(cycle, key=_CYCLE_KEY))
    return NarrowClassGroup(disc, tuple(sorted(reps)))


def picard_S(order: Order, p: int) -> NarrowClassGroup:
    """Pic+(O_f[1/p]) for p inert in the field and coprime to f.

    Computed as Pic+(O_f) modulo the class of the ideal (p); since p is
    inert and positive that ideal is narrowly principal, so the quotient
    equals Pic+(O_f) itself.
    """
    d_K = order.field.d_K
    sym = kronecker(d_K, p)
    if sym == 1:
        raise PreconditionError(f"p = {p} splits in the field of discriminant {d_K}")
    if sym == 0:
        raise PreconditionError(f"p = {p} ramifies in the field of discriminant {d_K}")
    if order.f % p == 0:
        raise PreconditionError(f"p = {p} divides the conductor {order.f}")
    g = narrow_class_group(order.disc)
    return NarrowClassGroup(g.disc, g.classes, s_prime=p)

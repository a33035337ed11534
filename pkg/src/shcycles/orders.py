"""Real quadratic fields, their orders Z[f*omega], units and discriminants.

Elements are stored exactly as (x + y*sqrt(d_K))/2 with rational x, y over
the fundamental discriminant d_K; no floating point enters this module
except through the two real embeddings, which are provided for callers
that need numeric values.  All membership, trace, norm and unit
computations are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, SearchBoundExceeded

# Search guards.  Honest failure beats a silently wrong answer.
PELL_SEARCH_BOUND = 10**6
CF_STEP_BOUND = 10**6
ORDER_POWER_BOUND = 10**4


def is_squarefree(n: int) -> bool:
    if n <= 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def kronecker(a: int, p: int) -> int:
    """Kronecker symbol (a|p) for p prime (p = 2 allowed)."""
    if p == 2:
        if a % 2 == 0:
            return 0
        return 1 if a % 8 in (1, 7) else -1
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt(D)) for squarefree D > 1, with omega_K = (t + sqrt(d_K))/2."""

    D: int
    d_K: int
    t: int

    def omega(self) -> "QuadElement":
        return QuadElement(self.d_K, Fraction(self.t), Fraction(1))

    def omega0(self) -> "QuadElement":
        # trace-zero part: omega0 = sqrt(d_K), omega = (t + omega0)/2
        return QuadElement(self.d_K, Fraction(0), Fraction(2))

    def sqrt_value(self) -> float:
        return math.sqrt(self.d_K)

    def element(self, x, y) -> "QuadElement":
        return QuadElement(self.d_K, Fraction(x), Fraction(y))

    def from_integer(self, n) -> "QuadElement":
        return QuadElement(self.d_K, Fraction(2 * n), Fraction(0))


def make_field(D: int) -> QuadField:
    if D <= 1:
        raise PreconditionError(f"D must be > 1, got {D}")
    if not is_squarefree(D):
        raise PreconditionError(f"D must be squarefree, got {D}")
    if D % 4 == 1:
        d_K, t = D, 1
    else:
        d_K, t = 4 * D, 0
    return QuadField(D=D, d_K=d_K, t=t)


def field_from_discriminant(d: int) -> QuadField:
    """Inverse of make_field on fundamental discriminants."""
    if d % 4 == 1:
        f = make_field(d)
    elif d % 4 == 0:
        f = make_field(d // 4)
    else:
        raise PreconditionError(f"{d} is not a discriminant")
    if f.d_K != d:
        raise PreconditionError(f"{d} is not a fundamental discriminant")
    return f


@dataclass(frozen=True)
class QuadElement:
    """(x + y*sqrt(d))/2 with exact rational x, y."""

    d: int
    x: Fraction
    y: Fraction

    def _check(self, other: "QuadElement") -> None:
        if self.d != other.d:
            raise PreconditionError("elements of different fields")

    def __add__(self, other):
        other = self._coerce(other)
        return QuadElement(self.d, self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        other = self._coerce(other)
        return QuadElement(self.d, self.x - other.x, self.y - other.y)

    def __neg__(self):
        return QuadElement(self.d, -self.x, -self.y)

    def __mul__(self, other):
        other = self._coerce(other)
        x = (self.x * other.x + self.y * other.y * self.d) / 2
        y = (self.x * other.y + self.y * other.x) / 2
        return QuadElement(self.d, x, y)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __radd__(self, other):
        return self.__add__(other)

    def _coerce(self, other) -> "QuadElement":
        if isinstance(other, QuadElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement(self.d, Fraction(2 * other), Fraction(0))
        raise TypeError(f"cannot combine QuadElement with {type(other)}")

    def __pow__(self, n: int) -> "QuadElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElement(self.d, Fraction(2), Fraction(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "QuadElement":
        return QuadElement(self.d, self.x, -self.y)

    def trace(self) -> Fraction:
        return self.x

    def norm(self) -> Fraction:
        return (self.x * self.x - self.y * self.y * self.d) / 4

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("element has norm 0")
        return QuadElement(self.d, self.x / n, -self.y / n)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def is_integral(self) -> bool:
        """Algebraic integer: x, y in Z with x = y*d (mod 2)."""
        if self.x.denominator != 1 or self.y.denominator != 1:
            return False
        return (self.x - self.y * self.d) % 2 == 0

    def in_order(self, f: int) -> bool:
        """Membership in O_f = Z[f*omega_K]."""
        if not self.is_integral():
            return False
        y = int(self.y)
        if y % f != 0:
            return False
        b = y // f
        t = self.d % 2
        return (int(self.x) - b * f * t) % 2 == 0

    def embed(self, sign: int = 1) -> float:
        """Real embedding sending sqrt(d) to +sqrt(d) (sign=1) or -sqrt(d)."""
        return (float(self.x) + sign * float(self.y) * math.sqrt(self.d)) / 2

    def __repr__(self):
        return f"({self.x} + {self.y}*sqrt({self.d}))/2"


@dataclass(frozen=True)
class Order:
    """O_f = Z[f*omega_K] inside the maximal order of the field."""

    field: QuadField
    f: int

    def __post_init__(self):
        if self.f < 1:
            raise PreconditionError(f"conductor must be >= 1, got {self.f}")

    @property
    def disc(self) -> int:
        return self.f * self.f * self.field.d_K

    def contains(self, other: "Order") -> bool:
        # O_f is contained in O_f' iff f' | f
        return self.field == other.field and self.f % other.f == 0

    def generator(self) -> QuadElement:
        """f * omega_K."""
        fld = self.field
        return QuadElement(fld.d_K, Fraction(self.f * fld.t), Fraction(self.f))


def trace_zero_decomposition(x: QuadElement) -> tuple[int, QuadElement]:
    """Write x = (a + y)/2 with a an integer and y of trace zero.

    The decomposition is unique; x must lie in some order.
    """
    if not x.is_integral():
        raise PreconditionError(f"{x} is not integral")
    a = int(x.x)
    y = QuadElement(x.d, Fraction(0), 2 * x.y)
    return a, y


def _cf_floor(P: int, Q: int, sq: int) -> int:
    # floor((P + sqrt(d))/Q) with sq = isqrt(d), d nonsquare
    if Q > 0:
        return (P + sq) // Q
    return -((P + sq) // (-Q)) - 1


def fundamental_unit(field: QuadField) -> QuadElement:
    """Smallest unit > 1 of the maximal order, via the continued fraction
    of omega_K; falls back to a direct Pell search if the expansion fails
    a sanity check."""
    d = field.d_K
    sq = math.isqrt(d)
    # state (P, Q) for the quadratic irrational (P + sqrt(d))/Q
    P, Q = field.t, 2
    seen: dict[tuple[int, int], int] = {}
    partial: list[int] = []
    states: list[tuple[int, int]] = []
    for _ in range(CF_STEP_BOUND):
        if (P, Q) in seen:
            break
        seen[(P, Q)] = len(partial)
        states.append((P, Q))
        a = _cf_floor(P, Q, sq)
        partial.append(a)
        P2 = a * Q - P
        if (d - P2 * P2) % Q != 0:
            raise SearchBoundExceeded("continued fraction state corrupted")
        P, Q = P2, (d - P2 * P2) // Q
    else:
        raise SearchBoundExceeded("continued fraction did not become periodic")
    i = seen[(P, Q)]
    # matrix product over one period fixes theta_i; its eigenvalue is a unit
    p, q, r, s = 1, 0, 0, 1
    for a in partial[i:]:
        p, q, r, s = p * a + q, p, r * a + s, r
    Pi, Qi = states[i]
    lam_x = Fraction(2 * (r * Pi + s * Qi), Qi)
    lam_y = Fraction(2 * r, Qi)
    unit = QuadElement(d, lam_x, lam_y)
    if not unit.is_integral() or abs(unit.norm()) != 1 or unit.y == 0:
        return pell_fundamental_unit(field)
    # of the four associates (+-x +- y*sqrt(d))/2 exactly one has both
    # coordinates positive, and it is the representative > 1
    return QuadElement(d, abs(unit.x), abs(unit.y))


def pell_fundamental_unit(field: QuadField, bound: int = PELL_SEARCH_BOUND) -> QuadElement:
    """Smallest (x + y*sqrt(d_K))/2 > 1 with x^2 - d_K*y^2 = +-4, by direct
    search on y.  Used as fallback and as the independent test oracle."""
    d = field.d_K
    for y in range(1, bound + 1):
        dy2 = d * y * y
        hits = []
        for sgn in (-4, 4):
            n = dy2 + sgn
            if n > 0 and is_square(n):
                hits.append(math.isqrt(n))
        if hits:
            x = min(hits)
            return QuadElement(d, Fraction(x), Fraction(y))
    raise SearchBoundExceeded(f"no unit found with y <= {bound} for d_K = {d}")


def order_fundamental_unit(order: Order) -> QuadElement:
    """Smallest unit > 1 of O_f (a power of the field's fundamental unit)."""
    eps = fundamental_unit(order.field)
    power = eps
    for _ in range(ORDER_POWER_BOUND):
        if power.in_order(order.f):
            return power
        power = power * eps
    raise SearchBoundExceeded(
        f"no power of the fundamental unit lands in O_{order.f} "
        f"within {ORDER_POWER_BOUND} steps"
    )


def totally_positive_fundamental_unit(order: Order) -> QuadElement:
    """Smallest totally positive unit > 1 of O_f.

    For a unit eps > 1 of norm +1 the conjugate 1/eps is automatically
    positive, so this is the order's fundamental unit or its square.
    """
    eps = order_fundamental_unit(order)
    if eps.norm() == -1:
        eps = eps * eps
    # norm +1 with positive coordinates forces both embeddings positive;
    # checking the conjugate through floats would cancel catastrophically
    assert eps.norm() == 1 and eps.in_order(order.f)
    assert eps.x > 0 and eps.y > 0
    return eps

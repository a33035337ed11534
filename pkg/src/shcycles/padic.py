"""Fixed-precision arithmetic in Q_p and in the unramified quadratic
extension Q_p(alpha) with alpha^2 = u, u the least positive non-residue
mod p.

A nonzero value is p^v * (unit + O(p^prec)): ``prec`` counts significant
digits.  Zero values carry the absolute precision to which they are known
to vanish.  Operations raise PrecisionError instead of silently returning
numbers with fewer than MIN_PRECISION digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, PrecisionError
from .orders import QuadField, kronecker

MIN_PRECISION = 2
EXACT = 10**9  # absolute precision tag for exact zeros


def v_p(n: int, p: int) -> int:
    if n == 0:
        return EXACT
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicNumber:
    p: int
    v: int          # valuation; for zero: absolute precision O(p^v)
    unit: int       # unit part mod p^prec; 0 for zero
    prec: int       # significant digits; 0 for zero
    zero: bool = False

    @classmethod
    def zero_mod(cls, p: int, abs_prec: int) -> "PadicNumber":
        return cls(p, abs_prec, 0, 0, zero=True)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> "PadicNumber":
        if n == 0:
            return cls.zero_mod(p, EXACT)
        v = v_p(n, p)
        u = n // p**v
        return cls(p, v, u % p**prec, prec)

    @classmethod
    def from_fraction(cls, q, p: int, prec: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls.zero_mod(p, EXACT)
        num, den = q.numerator, q.denominator
        vn, vd = v_p(num, p), v_p(den, p)
        u = (num // p**vn) * pow(den // p**vd, -1, p**prec)
        return cls(p, vn - vd, u % p**prec, prec)

    @property
    def abs_prec(self) -> int:
        return self.v if self.zero else self.v + self.prec

    def _guard(self, prec: int) -> int:
        if prec < MIN_PRECISION:
            raise PrecisionError(
                f"result would carry {prec} digits (< {MIN_PRECISION})"
            )
        return prec

    def __add__(self, other: "PadicNumber") -> "PadicNumber":
        p = self.p
        ap = min(self.abs_prec, other.abs_prec)
        if self.zero and other.zero:
            return PadicNumber.zero_mod(p, ap)
        if self.zero:
            return other.truncate_abs(ap)
        if other.zero:
            return self.truncate_abs(ap)
        v0 = min(self.v, other.v)
        mod = p ** (ap - v0)
        s = (self.unit * p ** (self.v - v0) + other.unit * p ** (other.v - v0)) % mod
        if s == 0:
            return PadicNumber.zero_mod(p, ap)
        k = v_p(s, p)
        unit = s // p**k
        prec = self._guard(ap - v0 - k)
        return PadicNumber(p, v0 + k, unit % p**prec, prec)

    def __neg__(self) -> "PadicNumber":
        if self.zero:
            return self
        return PadicNumber(self.p, self.v, (-self.unit) % self.p**self.prec, self.prec)

    def __sub__(self, other: "PadicNumber") -> "PadicNumber":
        return self + (-other)

    def __mul__(self, other: "PadicNumber") -> "PadicNumber":
        p = self.p
        if self.zero or other.zero:
            # a value O(p^a) times one of valuation v is O(p^(a+v))
            return PadicNumber.zero_mod(p, min(self.v + other.v, EXACT))
        prec = min(self.prec, other.prec)
        return PadicNumber(
            p, self.v + other.v, (self.unit * other.unit) % p**prec, prec
        )

    def inverse(self) -> "PadicNumber":
        if self.zero:
            raise ZeroDivisionError("inverse of (indistinguishable from) zero")
        return PadicNumber(
            self.p, -self.v, pow(self.unit, -1, self.p**self.prec), self.prec
        )

    def __truediv__(self, other: "PadicNumber") -> "PadicNumber":
        return self * other.inverse()

    def truncate_abs(self, abs_prec: int) -> "PadicNumber":
        """Forget digits beyond absolute precision O(p^abs_prec)."""
        if self.zero:
            return PadicNumber.zero_mod(self.p, min(self.v, abs_prec))
        prec = self._guard(min(self.abs_prec, abs_prec) - self.v)
        return PadicNumber(self.p, self.v, self.unit % self.p**prec, prec)

    def residue(self, k: int = 1) -> int:
        """Value mod p^k as an integer in [0, p^k); requires v >= 0."""
        if self.zero:
            if self.v < k:
                raise PrecisionError("zero not known to enough digits")
            return 0
        if self.v < 0:
            raise PreconditionError("negative valuation has no residue")
        if self.abs_prec < k:
            raise PrecisionError("not enough digits for the residue")
        return (self.unit * self.p**self.v) % self.p**k

    def agrees(self, other: "PadicNumber", k: int | None = None) -> bool:
        """Equality modulo p^k (default: the shared absolute precision)."""
        if k is None:
            k = min(self.abs_prec, other.abs_prec)
        d = self - other
        return d.zero and d.v >= k

    def __repr__(self):
        if self.zero:
            return f"O({self.p}^{self.v})"
        return f"{self.unit}*{self.p}^{self.v} + O({self.p}^{self.abs_prec})"


def tonelli_sqrt(a: int, p: int) -> int:
    """Square root of a quadratic residue a mod an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise PreconditionError(f"{a} is not a residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def hensel_sqrt(a: int, p: int, prec: int) -> int:
    """Square root of a mod p^prec by Newton lifting (p odd, p not | a)."""
    c = tonelli_sqrt(a % p, p)
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p**k
        c = (c - (c * c - a) * pow(2 * c, -1, mod)) % mod
    return c % p**prec


def least_nonresidue(p: int) -> int:
    for u in range(2, p):
        if pow(u, (p - 1) // 2, p) == p - 1:
            return u
    raise PreconditionError(f"{p} has no non-residue; not an odd prime?")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Qp2Element:
    """x + y*alpha in Q_p(alpha), alpha^2 = u."""

    p: int
    u: int
    x: PadicNumber
    y: PadicNumber

    @classmethod
    def make(cls, p: int, u: int, x, y, prec: int) -> "Qp2Element":
        conv = lambda t: t if isinstance(t, PadicNumber) else PadicNumber.from_fraction(t, p, prec)  # noqa: E731
        return cls(p, u, conv(x), conv(y))

    @classmethod
    def alpha(cls, p: int, u: int, prec: int) -> "Qp2Element":
        return cls.make(p, u, 0, 1, prec)

    def _check(self, other: "Qp2Element") -> None:
        if self.p != other.p or self.u != other.u:
            raise PreconditionError("elements of different quadratic extensions")

    def __add__(self, other: "Qp2Element") -> "Qp2Element":
        self._check(other)
        return Qp2Element(self.p, self.u, self.x + other.x, self.y + other.y)

    def __neg__(self) -> "Qp2Element":
        return Qp2Element(self.p, self.u, -self.x, -self.y)

    def __sub__(self, other: "Qp2Element") -> "Qp2Element":
        return self + (-other)

    def __mul__(self, other: "Qp2Element") -> "Qp2Element":
        self._check(other)
        up = PadicNumber.from_int(self.u, self.p, max(self.x.prec, self.y.prec, MIN_PRECISION))
        x = self.x * other.x + self.y * other.y * up
        y = self.x * other.y + self.y * other.x
        return Qp2Element(self.p, self.u, x, y)

    def conj(self) -> "Qp2Element":
        """Galois conjugate x - y*alpha; a ring automorphism fixing Q_p."""
        return Qp2Element(self.p, self.u, self.x, -self.y)

    def norm(self) -> PadicNumber:
        up = PadicNumber.from_int(self.u, self.p, max(self.x.prec, self.y.prec, MIN_PRECISION))
        return self.x * self.x - self.y * self.y * up

    def inverse(self) -> "Qp2Element":
        n = self.norm()
        if n.zero:
            raise PrecisionError("norm indistinguishable from zero; raise precision")
        ninv = n.inverse()
        c = self.conj()
        return Qp2Element(self.p, self.u, c.x * ninv, c.y * ninv)

    def __truediv__(self, other: "Qp2Element") -> "Qp2Element":
        return self * other.inverse()

    def is_rational(self) -> bool:
        return self.y.zero

    def scale(self, r) -> "Qp2Element":
        prec = max(self.x.prec, self.y.prec, MIN_PRECISION)
        rp = PadicNumber.from_fraction(r, self.p, prec)
        return Qp2Element(self.p, self.u, self.x * rp, self.y * rp)

    def __repr__(self):
        return f"({self.x}) + ({self.y})*alpha"


def embed_sqrt_dK(field: QuadField, p: int, prec: int = 40) -> Qp2Element:
    """A square root of d_K in Q_p(alpha), for p odd and inert in the
    field.  Returns c*alpha with c the Hensel lift of sqrt(d_K/u), the sign
    fixed by taking the root with the smaller least positive residue mod p.
    """
    if prec < 2:
        raise PreconditionError("precision must be at least 2")
    if p == 2 or not _is_prime(p):
        raise PreconditionError(f"p = {p} must be an odd prime")
    d = field.d_K
    if d % p == 0:
        raise PreconditionError(f"p = {p} ramifies in the field (p | d_K)")
    if kronecker(d, p) != -1:
        raise PreconditionError(f"p = {p} splits in the field of discriminant {d}")
    u = least_nonresidue(p)
    a = d * pow(u, -1, p**prec) % p**prec
    c = hensel_sqrt(a, p, prec)
    if c % p > p - c % p:
        c = (-c) % p**prec
    return Qp2Element.make(p, u, 0, PadicNumber(p, 0, c, prec), prec)


def moebius_qp2(g, tau: Qp2Element) -> Qp2Element:
    """(a*tau + b)/(c*tau + d) for a rational 2x2 matrix g; precision loss
    is accounted for by the underlying arithmetic and surfaces as
    PrecisionError when digits run out."""
    (a, b), (c, d) = g
    if Fraction(a) * Fraction(d) - Fraction(b) * Fraction(c) == 0:
        raise PreconditionError("moebius matrix is singular")
    prec = max(tau.x.prec, tau.y.prec, MIN_PRECISION)
    mk = lambda r: PadicNumber.from_fraction(r, tau.p, prec)  # noqa: E731
    num = Qp2Element(tau.p, tau.u, tau.x * mk(a) + mk(b), tau.y * mk(a))
    den = Qp2Element(tau.p, tau.u, tau.x * mk(c) + mk(d), tau.y * mk(c))
    if den.x.zero and den.y.zero:
        raise PrecisionError("denominator indistinguishable from zero")
    return num / den

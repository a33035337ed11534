"""ATR cycles over a real quadratic base field F of narrow class number 1.

K = F(sqrt(delta)) is almost totally real when delta is negative at the
first real embedding of F and positive at the second: the cycle then pairs
a single complex point tau_0 (from sigma_0) with a geodesic between the two
real roots (from sigma_1).  The module constructs cycles from explicit
relative forms, searches the rank-one group of totally positive relative
units stabilizing them, and computes discriminant norms.  Relative class
groups are out of desk scope; cycle families come from configured form
lists.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, SearchBoundExceeded
from .orders import QuadElement, QuadField, fundamental_unit, make_field

# base fields with narrow class number 1 (asserted, not computed)
BASE_ALLOWLIST = (2, 5, 13)

UNIT_POWER_SCAN = 8


@dataclass(frozen=True)
class BaseField:
    D: int
    field: QuadField

    def sigma(self, x: QuadElement, j: int) -> float:
        """The two real embeddings: sigma_0 sends sqrt(D) to +sqrt(D)."""
        return x.embed(1 if j == 0 else -1)

    def unit(self) -> QuadElement:
        return fundamental_unit(self.field)

    def element(self, x, y) -> QuadElement:
        return self.field.element(x, y)


def make_base_field(D: int) -> BaseField:
    if D not in BASE_ALLOWLIST:
        raise PreconditionError(
            f"base field Q(sqrt({D})) is not in the allowlist {BASE_ALLOWLIST}"
        )
    return BaseField(D=D, field=make_field(D))


def _frac_is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def _frac_sqrt(q: Fraction) -> Fraction:
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


def sqrt_in_F(e: QuadElement) -> QuadElement | None:
    """Exact square root in F = Q(sqrt(d)), or None.  Writing e = er + ei*sqrt(d)
    and a root as r + s*sqrt(d): either ei = 0 (rational case) or
    r^2 = (er +- sqrt(N(e)))/2 must be a rational square."""
    d = e.d
    er, ei = Fraction(e.x, 2), Fraction(e.y, 2)
    if ei == 0:
        if _frac_is_square(er):
            r = _frac_sqrt(er)
            return QuadElement(d, 2 * r, Fraction(0))
        if er != 0 and _frac_is_square(er / d):
            s = _frac_sqrt(er / d)
            return QuadElement(d, Fraction(0), 2 * s)
        return None
    nrm = er * er - d * ei * ei
    if not _frac_is_square(nrm):
        return None
    w = _frac_sqrt(nrm)
    for sign in (1, -1):
        r2 = (er + sign * w) / 2
        if r2 > 0 and _frac_is_square(r2):
            r = _frac_sqrt(r2)
            s = ei / (2 * r)
            cand = QuadElement(d, 2 * r, 2 * s)
            if (cand * cand - e).is_zero():
                return cand
    return None


def is_atr(base: BaseField, delta: QuadElement) -> bool:
    """sigma_0(delta) < 0 < sigma_1(delta); squares are rejected."""
    if sqrt_in_F(delta) is not None:
        raise PreconditionError(f"delta = {delta} is a square in F")
    return base.sigma(delta, 0) < 0 < base.sigma(delta, 1)


@dataclass(frozen=True)
class ATRExtension:
    """K = F(sqrt(delta)) with the relative order Z_F[f*omega_K]."""

    base: BaseField
    delta: QuadElement
    f: QuadElement
    t: int                    # omega_K = (t + sqrt(delta_t))/2
    d_K: QuadElement          # delta if t = 1 else 4*delta

    def gen_trace(self) -> QuadElement:
        """trace of f*omega_K over F."""
        return self.f * self.t

    def gen_norm(self) -> QuadElement:
        """norm of f*omega_K over F: f^2 * (t^2 - d_K)/4."""
        t_sq = self.base.field.from_integer(self.t * self.t)
        return self.f * self.f * ((t_sq - self.d_K) * Fraction(1, 4))

    def omega_values(self, j: int) -> tuple[float, float]:
        """The two real values of omega_K under sigma_j (j = 1 only for ATR)."""
        sd = math.sqrt(self.base.sigma(self.delta, j))
        if self.t == 1:
            return (1 + sd) / 2, (1 - sd) / 2
        return sd, -sd


def make_extension(base: BaseField, delta: QuadElement, f: QuadElement | None = None) -> ATRExtension:
    if not is_atr(base, delta):
        raise PreconditionError(f"delta = {delta} does not define an ATR extension")
    if f is None:
        f = base.field.from_integer(1)
    if not f.is_integral() or f.is_zero():
        raise PreconditionError("conductor must be a nonzero integer of F")
    # omega_K = (1 + sqrt(delta))/2 exactly when its minimal polynomial
    # X^2 - X + (1 - delta)/4 is integral
    quarter = (base.field.from_integer(1) - delta) * Fraction(1, 4)
    if quarter.is_integral():
        t, d_K = 1, delta
    else:
        t, d_K = 0, 4 * delta
    return ATRExtension(base=base, delta=delta, f=f, t=t, d_K=d_K)


@dataclass(frozen=True)
class RelElement:
    """x + y * (f*omega_K) with x, y in F."""

    ext: ATRExtension
    x: QuadElement
    y: QuadElement

    def __add__(self, other: "RelElement") -> "RelElement":
        return RelElement(self.ext, self.x + other.x, self.y + other.y)

    def __mul__(self, other: "RelElement") -> "RelElement":
        tr, nm = self.ext.gen_trace(), self.ext.gen_norm()
        x = self.x * other.x - self.y * other.y * nm
        y = self.x * other.y + self.y * other.x + self.y * other.y * tr
        return RelElement(self.ext, x, y)

    def __neg__(self) -> "RelElement":
        return RelElement(self.ext, -self.x, -self.y)

    def conj(self) -> "RelElement":
        return RelElement(self.ext, self.x + self.y * self.ext.gen_trace(), -self.y)

    def rel_norm(self) -> QuadElement:
        """N_{K/F}."""
        tr, nm = self.ext.gen_trace(), self.ext.gen_norm()
        return self.x * self.x + self.x * self.y * tr + self.y * self.y * nm

    def is_in_base(self) -> bool:
        return self.y.is_zero()

    def is_integral(self) -> bool:
        return self.x.is_integral() and self.y.is_integral()

    def embeds(self, j: int) -> tuple[float, float]:
        """The two real values under the embeddings of K extending sigma_j."""
        wp, wm = self.ext.omega_values(j)
        base = self.ext.base
        xf, yf = base.sigma(self.x, j), base.sigma(self.y * self.ext.f, j)
        return xf + yf * wp, xf + yf * wm

    def inverse_unit(self) -> "RelElement":
        """Inverse, assuming N_{K/F} is a unit of Z_F."""
        nu = self.rel_norm()
        n_q = nu.norm()
        if abs(n_q) != 1:
            raise PreconditionError("not a relative unit")
        nu_inv = nu.conj() if n_q == 1 else -nu.conj()
        c = self.conj()
        return RelElement(self.ext, c.x * nu_inv, c.y * nu_inv)

    def power(self, n: int) -> "RelElement":
        if n < 0:
            return self.inverse_unit().power(-n)
        one = RelElement(self.ext, self.ext.base.field.from_integer(1), self.ext.base.field.from_integer(0))
        out, b = one, self
        while n:
            if n & 1:
                out = out * b
            b = b * b
            n >>= 1
        return out


@dataclass(frozen=True)
class ATRCycle:
    ext: ATRExtension
    form: tuple[QuadElement, QuadElement, QuadElement]
    tau0: complex
    endpoints: tuple[float, float]

    def psi(self, u: RelElement):
        """psi(u) as a 2x2 matrix over F; psi(f*omega_K) = (f*t + W)/2."""
        a, b, c = self.form
        half = Fraction(1, 2)
        ft = self.ext.gen_trace()
        m11 = u.x + u.y * (ft + b) * half
        m12 = u.y * c
        m21 = -(u.y * a)
        m22 = u.x + u.y * (ft - b) * half
        return ((m11, m12), (m21, m22))

    def psi_complex(self, u: RelElement, j: int):
        m = self.psi(u)
        s = self.ext.base.sigma
        return ((s(m[0][0], j), s(m[0][1], j)), (s(m[1][0], j), s(m[1][1], j)))


def atr_cycle_from_form(
    q: tuple[QuadElement, QuadElement, QuadElement], ext: ATRExtension
) -> ATRCycle:
    """tau_0 = the sigma_0-root with positive imaginary part; the endpoints
    are the two sigma_1-roots.  The form's discriminant must equal f^2 d_K
    as an exact identity in Z_F."""
    a, b, c = q
    disc = b * b - 4 * a * c
    expected = ext.f * ext.f * ext.d_K
    if not (disc - expected).is_zero():
        raise PreconditionError(
            f"form discriminant {disc} differs from f^2 d_K = {expected}"
        )
    base = ext.base
    if base.sigma(a, 0) == 0:
        raise PreconditionError("leading coefficient vanishes at sigma_0")
    d0 = base.sigma(disc, 0)
    d1 = base.sigma(disc, 1)
    if not (d0 < 0 < d1):
        raise PreconditionError("discriminant sign pattern is not ATR")
    a0, b0 = base.sigma(a, 0), base.sigma(b, 0)
    tau0 = (-b0 + cmath.sqrt(complex(d0))) / (2 * a0)
    if tau0.imag < 0:
        tau0 = tau0.conjugate()
    a1, b1 = base.sigma(a, 1), base.sigma(b, 1)
    r1 = (-b1 - math.sqrt(d1)) / (2 * a1)
    r2 = (-b1 + math.sqrt(d1)) / (2 * a1)
    # W^2 = f^2 d_K * Id as an exact matrix identity
    w_sq_off = b * (2 * c) + (2 * c) * (-b)
    assert w_sq_off.is_zero()
    w_sq_diag = b * b + (2 * c) * (-2 * a)
    assert (w_sq_diag - expected).is_zero()
    return ATRCycle(ext=ext, form=(a, b, c), tau0=tau0, endpoints=(r1, r2))


def _integral_pairs(bound: int, d: int):
    """Integral elements (x1 + x2*sqrt(d))/2 with |x1|, |x2| <= bound."""
    for x2 in range(-bound, bound + 1):
        par = (x2 * d) % 2
        start = -bound if (-bound) % 2 == par else -bound + 1
        for x1 in range(start, bound + 1, 2):
            yield Fraction(x1), Fraction(x2)


@dataclass(frozen=True)
class UnitSearchResult:
    unit: RelElement
    candidates: int
    translation_length: float


def _search_candidates(ext: ATRExtension, bound: int) -> list[RelElement]:
    """All totally positive relative units u = x + y*(f*omega_K) with the
    y-coordinates in the box and N_{K/F}(u) = +-eps_F^k in the scanned
    exponent range; x is determined by an exact square root of
    y^2 f^2 d_K + 4 nu in F."""
    eps = ext.base.unit()
    tr = ext.gen_trace()
    disc_g = ext.f * ext.f * ext.d_K
    units = []
    for k in range(-UNIT_POWER_SCAN, UNIT_POWER_SCAN + 1):
        val = eps ** k
        units.extend((val, -val))
    res = []
    for y1, y2 in _integral_pairs(bound, ext.delta.d):
        if y1 == 0 and y2 == 0:
            continue
        y = QuadElement(ext.delta.d, y1, y2)
        y2disc = y * y * disc_g
        for nu in units:
            s = sqrt_in_F(y2disc + 4 * nu)
            if s is None:
                continue
            for sign in (1, -1):
                x = (-(y * tr) + sign * s) * Fraction(1, 2)
                if not x.is_integral():
                    continue
                u = RelElement(ext, x, y)
                vplus, vminus = u.embeds(1)
                if vplus <= 0 or vminus <= 0:
                    continue
                if abs(math.log(vplus / vminus)) < 1e-9:
                    continue
                res.append(u)
    return res


def unit_stabilizer_search(ext: ATRExtension, bound: int = 24) -> UnitSearchResult:
    """Generator of the rank-one group of totally positive relative units.

    Among the box solutions the one with the smallest positive translation
    length |log(sigma_1+ / sigma_1-)| is returned, with deterministic tie
    breaking.  Exhausting the box without a hit raises, never guesses.
    """
    found = [
        (abs(math.log(u.embeds(1)[0] / u.embeds(1)[1])), u)
        for u in _search_candidates(ext, bound)
    ]
    if not found:
        raise SearchBoundExceeded(
            f"no totally positive relative unit in the box of size {bound}"
        )
    found.sort(key=lambda t: (t[0], abs(t[1].x.x), abs(t[1].x.y), t[1].x.x, t[1].x.y))
    ell, u = found[0]
    return UnitSearchResult(unit=u, candidates=len(found), translation_length=ell)


def generates_bounded_units(result: UnitSearchResult, ext: ATRExtension, bound: int = 24) -> bool:
    """Rank-one certificate: every unit found in the box differs from a
    power of the generator by a unit of Z_F."""
    gen = result.unit
    for u in _search_candidates(ext, bound):
        ok = False
        for k in range(-UNIT_POWER_SCAN, UNIT_POWER_SCAN + 1):
            w = u * gen.power(-k)
            if w.is_in_base() and abs(w.x.norm()) == 1:
                ok = True
                break
        if not ok:
            return False
    return True


def atr_discriminant_norm(ext: ATRExtension) -> tuple[int, int]:
    """(|N_{F/Q}(f^2 d_K)|, toral discriminant 16 * |N_{F/Q}(f^2 d_K)|)."""
    n = (ext.f * ext.f * ext.d_K).norm()
    if n.denominator != 1:
        raise PreconditionError("discriminant is not integral")
    return abs(int(n)), 16 * abs(int(n))


class _KNum:
    """Exact elements P + Q*sqrt(d_K) of K with P, Q in F; enough arithmetic
    to certify fixed points without any floating point."""

    __slots__ = ("ext", "P", "Q")

    def __init__(self, ext: ATRExtension, P: QuadElement, Q: QuadElement):
        self.ext, self.P, self.Q = ext, P, Q

    def __add__(self, o):
        return _KNum(self.ext, self.P + o.P, self.Q + o.Q)

    def __sub__(self, o):
        return _KNum(self.ext, self.P - o.P, self.Q - o.Q)

    def __mul__(self, o):
        dk = self.ext.d_K
        return _KNum(
            self.ext,
            self.P * o.P + self.Q * o.Q * dk,
            self.P * o.Q + self.Q * o.P,
        )

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()


def fixes_endpoints_exactly(cycle: ATRCycle, u: RelElement) -> bool:
    """psi(u) fixes both roots of the form: checked as the exact identity
    (m11*tau + m12) - tau*(m21*tau + m22) = 0 in K, for both roots
    tau = (-b +- f*sqrt(d_K))/(2a)."""
    ext = cycle.ext
    a, b, c = cycle.form
    zero = ext.base.field.from_integer(0)
    m = cycle.psi(u)
    inv2a = (2 * a).inverse()
    for sign in (1, -1):
        tau = _KNum(ext, -b * inv2a, sign * ext.f * inv2a)
        lhs = _KNum(ext, m[0][0], zero) * tau + _KNum(ext, m[0][1], zero)
        rhs = tau * (_KNum(ext, m[1][0], zero) * tau + _KNum(ext, m[1][1], zero))
        if not (lhs - rhs).is_zero():
            return False
    return True

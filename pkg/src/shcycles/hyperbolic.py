"""Upper half plane geometry: Moebius maps, PSL_2(Z) fundamental-domain
reduction, geodesics of embeddings, and arc-length sampling.

Closed geodesics are sampled through a walker that carries the transported
form along with the accumulated reduction matrix.  A point inside the
fundamental domain always sits within O(log disc) of the apex of its
current semicircle, so every float computation stays well conditioned even
when the full period 2*log(eps+) is in the hundreds; sampling the base
semicircle directly would underflow there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .embeddings import Embedding
from .errors import PreconditionError
from .forms import IDENTITY, Mat2, mat_mul
from .orders import Order, QuadElement, totally_positive_fundamental_unit

REDUCTION_MAX_STEPS = 1000


def moebius(g, z: complex) -> complex:
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


def validate_uh(z: complex) -> complex:
    if z.imag <= 0:
        raise PreconditionError(f"point {z} is not in the upper half plane")
    return z


def reduce_to_fundamental_domain(z: complex) -> tuple[complex, Mat2]:
    """gamma * z with |Re| <= 1/2 and |z| >= 1; boundary ties resolved
    toward Re >= 0.  Returns (z*, gamma)."""
    validate_uh(z)
    g = IDENTITY
    for _ in range(REDUCTION_MAX_STEPS):
        n = math.floor(z.real + 0.5)
        if n != 0:
            z = complex(z.real - n, z.imag)
            g = (
                (g[0][0] - n * g[1][0], g[0][1] - n * g[1][1]),
                g[1],
            )
            continue
        if z.real * z.real + z.imag * z.imag < 1.0:
            w = -1 / z
            if w.imag <= z.imag:
                # an inversion inside the disc strictly gains height, so a
                # numeric non-gain means z is on the unit circle up to
                # float noise: stop rather than ping-pong
                break
            z = w
            g = ((-g[1][0], -g[1][1]), g[0])
            continue
        break
    else:
        raise PreconditionError(f"fundamental-domain reduction did not settle for {z}")
    # measure-zero ties: push Re = -1/2 to +1/2, and Re < 0 on |z| = 1 to Re > 0
    if z.real == -0.5:
        z = complex(0.5, z.imag)
        g = ((g[0][0] + g[1][0], g[0][1] + g[1][1]), g[1])
    if z.real < 0 and z.real * z.real + z.imag * z.imag == 1.0:
        z = -1 / z
        g = ((-g[1][0], -g[1][1]), g[0])
    return z, g


def is_boundary(z: complex, tol: float = 1e-12) -> bool:
    return abs(abs(z.real) - 0.5) < tol or abs(abs(z) - 1.0) < tol


def hyperbolic_distance(z: complex, w: complex) -> float:
    q = abs(z - w) ** 2 / (2 * z.imag * w.imag)
    return math.acosh(1 + q)


def quad_log(x: int, y: int, d: int) -> float:
    """log((x + y*sqrt(d))/2) for positive x, y that may exceed float range."""
    if x < 10**300 and y < 10**300:
        return math.log((x + y * math.sqrt(d)) / 2)
    return math.log(x) - math.log(2) + math.log1p(float(Fraction(y, x)) * math.sqrt(d))


@dataclass(frozen=True)
class GeodesicArc:
    """Geodesic semicircle of an embedding, with its closed-geodesic period.

    Endpoints are the roots (-b -+ f*sqrt(d_K))/(2a) of the associated form,
    kept exact through (a, b, f, d_K); the attracting endpoint (eigenvalue
    +f*sqrt(d_K)) is (-b - f*sqrt(d_K))/(2a).
    """

    a: int
    b: int
    f: int
    d_K: int
    L: float
    unit: QuadElement  # totally positive fundamental unit of O_f

    @property
    def center(self) -> float:
        return -self.b / (2 * self.a)

    @property
    def radius(self) -> float:
        return abs(self.f * math.sqrt(self.d_K) / (2 * self.a))

    @property
    def signed_radius(self) -> float:
        """attracting endpoint minus center."""
        return -self.f * math.sqrt(self.d_K) / (2 * self.a)

    def endpoints(self) -> tuple[float, float]:
        s = self.f * math.sqrt(self.d_K)
        return (-self.b - s) / (2 * self.a), (-self.b + s) / (2 * self.a)

    def point(self, t: float) -> complex:
        """Arc-length parametrization; t -> +oo runs into the attracting
        endpoint and t = 0 is the apex."""
        rs = self.signed_radius
        return complex(self.center + rs * math.tanh(t), abs(rs) / math.cosh(t))


def geodesic_from_embedding(e: Embedding) -> GeodesicArc:
    q = e.form()
    unit = totally_positive_fundamental_unit(Order(e.field, e.f))
    L = 2 * quad_log(int(unit.x), int(unit.y), e.field.d_K)
    return GeodesicArc(a=q.a, b=q.b, f=e.f, d_K=e.field.d_K, L=L, unit=unit)


def sample_geodesic(g: GeodesicArc, M: int) -> list[complex]:
    """M points equally spaced in hyperbolic arc length over one period,
    anchored at the apex (t0 = 0).  Direct evaluation; fine for desk-scale
    periods, use GeodesicWalker for long ones."""
    if M < 1:
        raise PreconditionError("need at least one sample")
    return [g.point(k * g.L / M) for k in range(M)]


def automorph(e: Embedding) -> Mat2:
    """psi(eps+) in SL_2(Z): positive trace, fixes both endpoints."""
    unit = totally_positive_fundamental_unit(Order(e.field, e.f))
    m = e.psi_int(unit)
    if m[0][0] + m[1][1] < 0:
        m = ((-m[0][0], -m[0][1]), (-m[1][0], -m[1][1]))
    return m


class GeodesicWalker:
    """Walks a closed geodesic in arc-length steps, emitting fundamental
    domain representatives together with the reducing matrices.

    State: the transported trace-zero matrix W' = delta * W0 * delta^-1
    (exact, entries in Z or Z[1/p] when an initial transform is supplied),
    the current arc-length parameter on W's semicircle, and delta in
    SL_2(Z).  The parameter is re-anchored through asinh after every
    crossing, which is well conditioned because reduced points sit near the
    apex of their current circle.
    """

    def __init__(self, e: Embedding, L: float, initial: Mat2 | None = None):
        self.E = e.f * math.sqrt(e.field.d_K)
        self.L = L
        W = tuple(tuple(Fraction(v) for v in row) for row in e.W)
        q = e.form()
        apex = complex(-q.b / (2 * q.a), abs(self.E / (2 * q.a)))
        if initial is not None:
            det = Fraction(initial[0][0]) * initial[1][1] - Fraction(initial[0][1]) * initial[1][0]
            if det <= 0:
                raise PreconditionError("initial transform must have positive determinant")
            inv = _inv_frac(initial, det)
            W = _mat_mul_frac(_mat_mul_frac(initial, W), inv)
        self.W = W
        self.delta: Mat2 = IDENTITY
        self.segment = 0
        self._refresh_floats()
        # anchor t = 0 at the image of the base apex, then reduce once
        if initial is None:
            self.t = 0.0
            z = apex
        else:
            z = moebius(initial, apex)
            t = math.asinh((z.real - self._cc) / z.imag)
            self.t = t if self._rs > 0 else -t
        self._land(z)

    def _refresh_floats(self) -> None:
        A = self.W[1][0] / -2  # leading form coefficient
        B = self.W[0][0]
        self._cc = float(-B / (2 * A))
        self._rs = -self.E / (2 * float(A))

    def _land(self, z: complex) -> None:
        """Reduce z, absorb the reducing matrix into the state, re-anchor t."""
        zstar, g = reduce_to_fundamental_domain(z)
        if g != IDENTITY:
            (a, b), (c, d) = g
            ginv = ((Fraction(d), Fraction(-b)), (Fraction(-c), Fraction(a)))
            gf = ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))
            self.W = _mat_mul_frac(_mat_mul_frac(gf, self.W), ginv)
            self.delta = mat_mul(g, self.delta)
            self.segment += 1
            self._refresh_floats()
            t = math.asinh((zstar.real - self._cc) / zstar.imag)
            self.t = t if self._rs > 0 else -t
        self.z = self.point()

    def point(self) -> complex:
        return complex(
            self._cc + self._rs * math.tanh(self.t),
            abs(self._rs) / math.cosh(self.t),
        )

    def advance(self, h: float) -> None:
        self.t += h
        z = self.point()
        if -0.5 <= z.real < 0.5 and z.real * z.real + z.imag * z.imag >= 1.0:
            self.z = z
            return
        self._land(z)

    def samples(self, M: int, h: float | None = None):
        """Yield (k, z*, delta, segment) for M arc-length steps of h
        (default L/M, one full period)."""
        if M < 1:
            raise PreconditionError("need at least one sample")
        step = self.L / M if h is None else h
        yield 0, self.z, self.delta, self.segment
        for k in range(1, M):
            self.advance(step)
            yield k, self.z, self.delta, self.segment


def _mat_mul_frac(g, h):
    (a, b), (c, d) = g
    (e, f), (x, y) = h
    return ((a * e + b * x, a * f + b * y), (c * e + d * x, c * f + d * y))


def _inv_frac(g, det):
    (a, b), (c, d) = g
    return ((Fraction(d) / det, Fraction(-b) / det), (Fraction(-c) / det, Fraction(a) / det))

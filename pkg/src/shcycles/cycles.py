"""Stark-Heegner cycles and their canonical sample points.

A cycle of conductor O_f[1/p] pairs the closed geodesic of an optimal
embedding with the p-adic fixed point tau_p of the same embedding, taken
inside Q_p(alpha) through the fixed square root of d_K.  There is one
cycle per narrow class of O_f[1/p], produced by the class-group action on
a base embedding.

Canonical coordinates on the quotient: move tau_p into the fiber over the
base vertex with a navigator g1, reduce the real coordinate to the
fundamental domain with delta in PSL_2(Z), apply both to the pair, and
read off the residue class of the p-adic coordinate.  For an interior real
coordinate the residual stabilizer is trivial (an element of the group
stabilizing the base vertex has unit determinant up to even p-powers and
integral entries, hence lies in PSL_2(Z), which acts freely there), so the
output is independent of every choice made along the way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .embeddings import Embedding, embedding_from_form, star_action
from .errors import PreconditionError, PrecisionError
from .forms import Mat2, NarrowClassGroup, QForm, picard_S
from .hyperbolic import GeodesicArc, GeodesicWalker, geodesic_from_embedding, is_boundary
from .orders import Order, QuadField, is_squarefree, kronecker
from .padic import MIN_PRECISION, Qp2Element, embed_sqrt_dK, moebius_qp2
from .tree import navigate_to_base, reduce_point, residue_class

MAX_PRECISION_DOUBLINGS = 4


@dataclass(frozen=True)
class SHCycle:
    order: Order
    p: int
    class_rep: QForm
    class_id: int
    embedding: Embedding
    geodesic: GeodesicArc
    tau_p: Qp2Element
    precision: int

    @property
    def disc_p(self) -> int:
        # prime-to-p part of the discriminant; p is odd, inert and coprime
        # to the conductor, so this is the discriminant itself
        return self.order.disc


@dataclass(frozen=True)
class CyclePoint:
    z: complex
    r: tuple[int, int]
    t_index: int
    boundary: bool


def _tau_p(e: Embedding, sqrt_d: Qp2Element) -> Qp2Element:
    """(-b - f*sqrt(d_K))/(2a) with sqrt(d_K) the fixed p-adic lift."""
    q = e.form()
    shift = Qp2Element.make(
        sqrt_d.p, sqrt_d.u, -q.b, 0, max(sqrt_d.y.prec, MIN_PRECISION)
    )
    return (shift - sqrt_d.scale(e.f)).scale(Fraction(1, 2 * q.a))


def build_cycles(
    field: QuadField, f: int, p: int, precision: int = 40
) -> list[SHCycle]:
    """One Stark-Heegner cycle per class of Pic+(O_f[1/p])."""
    if p == 2:
        raise PreconditionError("p = 2 is not supported for cycles")
    order = Order(field, f)
    group = picard_S(order, p)  # validates inertness and p coprime to f
    sqrt_d = embed_sqrt_dK(field, p, precision)
    base = embedding_from_form(group.classes[group.identity_index], field, f)
    cycles = []
    for idx, rep in enumerate(group.classes):
        e = star_action(rep, base)
        geo = geodesic_from_embedding(e)
        cycles.append(
            SHCycle(
                order=order,
                p=p,
                class_rep=rep,
                class_id=idx,
                embedding=e,
                geodesic=geo,
                tau_p=_tau_p(e, sqrt_d),
                precision=precision,
            )
        )
    return cycles


def picard_group(field: QuadField, f: int, p: int) -> NarrowClassGroup:
    return picard_S(Order(field, f), p)


def _compose_frac(delta: Mat2, g1) -> tuple:
    (a, b), (c, d) = delta
    (e, f_), (x, y) = g1
    return ((a * e + b * x, a * f_ + b * y), (c * e + d * x, c * f_ + d * y))


def canonical_points(
    cycle: SHCycle,
    M: int,
    navigator=None,
    perturb_sl2: Mat2 | None = None,
) -> list[CyclePoint]:
    """M canonical sample points, equally spaced in arc length over one
    period.  ``navigator`` overrides the navigator matrix (it must still
    carry the tree reduction of tau_p to the base vertex) and
    ``perturb_sl2`` left-multiplies it by an element of SL_2(Z); both exist
    so tests can verify that the output is choice-independent.

    Retries at doubled p-adic precision when digits run out.
    """
    precision = cycle.precision
    last_err: PrecisionError | None = None
    for _ in range(MAX_PRECISION_DOUBLINGS + 1):
        try:
            return _canonical_points_at(cycle, M, precision, navigator, perturb_sl2)
        except PrecisionError as err:
            last_err = err
            precision *= 2
    raise PrecisionError(
        f"canonical_points still failing at precision {precision}: {last_err}"
    )


def _canonical_points_at(
    cycle: SHCycle,
    M: int,
    precision: int,
    navigator,
    perturb_sl2: Mat2 | None,
) -> list[CyclePoint]:
    tau_p = cycle.tau_p
    if precision != cycle.precision:
        sqrt_d = embed_sqrt_dK(cycle.order.field, cycle.p, precision)
        tau_p = _tau_p(cycle.embedding, sqrt_d)
    g1 = navigate_to_base(reduce_point(tau_p)) if navigator is None else navigator
    if perturb_sl2 is not None:
        g1 = _compose_frac(perturb_sl2, g1)
    tau1 = moebius_qp2(g1, tau_p)
    walker = GeodesicWalker(cycle.embedding, cycle.geodesic.L, initial=g1)
    points: list[CyclePoint] = []
    seg_residues: dict[int, tuple[int, int]] = {}
    for k, zstar, delta, seg in walker.samples(M):
        # delta only changes at crossings, so the fiber work is per segment
        if seg not in seg_residues:
            seg_residues[seg] = residue_class(moebius_qp2(delta, tau1))
        points.append(
            CyclePoint(z=zstar, r=seg_residues[seg], t_index=k, boundary=is_boundary(zstar))
        )
    return points


def _fp2_moebius_residue(delta: Mat2, x0: int, y0: int, p: int, u: int) -> tuple[int, int]:
    """Residue of delta * (x0 + y0*alpha) over F_p(alpha); the denominator
    is a unit because the point is not rational mod p."""
    (a, b), (c, d) = delta
    nx, ny = (a * x0 + b) % p, (a * y0) % p
    dx, dy = (c * x0 + d) % p, (c * y0) % p
    nrm = (dx * dx - u * dy * dy) % p
    inv = pow(nrm, -1, p)
    rx = (nx * dx - u * ny * dy) * inv % p
    ry = (ny * dx - nx * dy) * inv % p
    return rx, ry


def cycle_point_stream(cycle: SHCycle, M: int):
    """Fast generator of CyclePoints: same walk as canonical_points but the
    fiber coordinate is computed in the residue field directly.  Only valid
    for the standard navigator (tau_p already reduces to the base vertex,
    which always holds for inert p: the leading form coefficient is then a
    unit mod p)."""
    tau = cycle.tau_p
    if tau.y.v != 0 or tau.x.v < 0:
        raise PreconditionError("tau_p does not sit over the base vertex")
    x0, y0 = tau.x.residue(1), tau.y.residue(1)
    p, u = tau.p, tau.u
    walker = GeodesicWalker(cycle.embedding, cycle.geodesic.L)
    seg_residues: dict[int, tuple[int, int]] = {}
    for k, zstar, delta, seg in walker.samples(M):
        if seg not in seg_residues:
            seg_residues[seg] = _fp2_moebius_residue(delta, x0, y0, p, u)
        yield CyclePoint(z=zstar, r=seg_residues[seg], t_index=k, boundary=is_boundary(zstar))


def toral_discriminant(field: QuadField, f: int) -> int:
    """4^[F:Q] * |N(f^2 d_K)| = 4 f^2 d_K over the rationals."""
    return 4 * f * f * field.d_K


def eligible_conductors(p: int, disc_min: int, disc_max: int):
    """(d_K, f) with d_K fundamental and inert at p, p coprime to f, and
    f^2 d_K in [disc_min, disc_max]; ordered by discriminant."""
    out = []
    for d in range(5, disc_max + 1):
        if d % 4 == 1:
            if not is_squarefree(d):
                continue
        elif d % 4 == 0:
            m = d // 4
            if m % 4 not in (2, 3) or not is_squarefree(m):
                continue
        else:
            continue
        if kronecker(d, p) != -1:
            continue
        f = 1
        while f * f * d <= disc_max:
            if f % p != 0 and f * f * d >= disc_min:
                out.append((d, f))
            f += 1
    out.sort(key=lambda t: (t[1] * t[1] * t[0], t[0]))
    return out

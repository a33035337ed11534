"""The Bruhat-Tits tree of PGL_2(Q_p) with vertices as balls in Q_p.

The vertex (n, x) is the ball B(x, p^-n), equivalently the homothety class
of the lattice spanned by (p^n, 0) and (x, 1); the standard dictionary
between balls and lattice classes is what act_on_vertex implements.  Points
of the unramified locus reduce to vertices (never to edge interiors), with
level v(y) and center x for tau = x + y*alpha.  Parity of the level is the
two-coloring that splits the quotient surface into components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, PrecisionError
from .padic import Qp2Element, v_p

FracMat = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def frac_val(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if x == 0:
        raise ZeroDivisionError("valuation of 0")
    return v_p(x.numerator, p) - v_p(x.denominator, p)


def frac_mod_p_power(x: Fraction, p: int, n: int) -> Fraction:
    """Canonical representative of x mod p^n in [0, p^n), as a rational with
    denominator a power of p.  The prime-to-p part of the denominator is
    inverted modulo the p-power."""
    x = Fraction(x)
    if x == 0 or frac_val(x, p) >= n:
        return Fraction(0)
    k = max(0, -frac_val(x, p))
    y = x * p**k  # now v_p(y) >= 0 and n + k > 0
    mod = p ** (n + k)
    r = y.numerator * pow(y.denominator, -1, mod) % mod
    return Fraction(r, p**k)


@dataclass(frozen=True)
class TreeVertex:
    """Ball B(x, p^-n); equality is ball equality (x mod p^n)."""

    p: int
    n: int
    x: Fraction

    @classmethod
    def make(cls, p: int, n: int, x) -> "TreeVertex":
        return cls(p, n, frac_mod_p_power(Fraction(x), p, n))

    @property
    def parity(self) -> int:
        return self.n % 2

    def __repr__(self):
        return f"B({self.x}, {self.p}^{-self.n})"


def base_vertex(p: int) -> TreeVertex:
    return TreeVertex(p, 0, Fraction(0))


def reduce_point(tau: Qp2Element) -> TreeVertex:
    """Reduction of tau = x + y*alpha to the tree: level v(y), center x."""
    if tau.y.zero:
        raise PreconditionError("tau lies in Q_p (y = 0); not a point of the upper half plane")
    n = tau.y.v
    if tau.x.zero:
        if tau.x.v < n:
            raise PrecisionError("x known to too few digits for this level")
        return TreeVertex(tau.p, n, Fraction(0))
    if tau.x.abs_prec < n:
        raise PrecisionError("x known to too few digits for this level")
    x = Fraction(tau.x.unit * Fraction(tau.p) ** tau.x.v)
    return TreeVertex.make(tau.p, n, x)


def act_on_vertex(g, v: TreeVertex) -> TreeVertex:
    """Image of the vertex under g in GL_2(Q) (p-denominators or not), via
    the lattice model: column-reduce g * [[p^n, x], [0, 1]] over Z_p."""
    p = v.p
    (a, b), (c, d) = (tuple(Fraction(t) for t in row) for row in g)
    if a * d - b * c == 0:
        raise PreconditionError("g is singular")
    pn = Fraction(p) ** v.n
    c1 = (a * pn, c * pn)
    c2 = (a * v.x + b, c * v.x + d)

    def val(t: Fraction) -> int:
        return frac_val(t, p) if t != 0 else 10**9

    if val(c1[1]) < val(c2[1]):
        c1, c2 = c2, c1
    if c2[1] == 0:
        raise PreconditionError("g is singular")
    r = c1[1] / c2[1]
    m = c1[0] - r * c2[0]
    w = c2[1]
    level = frac_val(m, p) - frac_val(w, p)
    center = c2[0] / w
    return TreeVertex.make(p, level, center)


def navigate_to_base(v: TreeVertex) -> FracMat:
    """g with act_on_vertex(g, v) = v0: translate the center away, then
    rescale the level; det g = p^n > 0, so g lies in the positive part of
    GL_2(Z[1/p])."""
    p = Fraction(v.p)
    return ((Fraction(1), -v.x), (Fraction(0), p**v.n))


def residue_class(tau: Qp2Element) -> tuple[int, int]:
    """Class of tau mod p in P^1(F_{p^2}) minus P^1(F_p), for tau reducing
    to the base vertex: the pair (x mod p, y mod p) with y a unit."""
    if reduce_point(tau) != base_vertex(tau.p):
        raise PreconditionError("tau does not reduce to the base vertex")
    return tau.x.residue(1), tau.y.residue(1)


def residue_class_count(p: int) -> int:
    return p * p - p


def all_residue_classes(p: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(p) for y in range(1, p)]


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    """The p + 1 adjacent vertices: one parent (coarser ball), p children."""
    parent = TreeVertex.make(v.p, v.n - 1, v.x)
    kids = [
        TreeVertex.make(v.p, v.n + 1, v.x + j * Fraction(v.p) ** v.n)
        for j in range(v.p)
    ]
    return [parent] + kids


def ball_neighborhood(p: int, radius: int) -> tuple[list[TreeVertex], list[tuple[TreeVertex, TreeVertex]]]:
    """Vertices within the given distance of the base vertex, with edges."""
    center = base_vertex(p)
    seen = {center}
    frontier = [center]
    edges = []
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    edges.append((v, w))
        frontier = nxt
    return sorted(seen, key=lambda t: (t.n, t.x)), edges


def to_dot(vertices, edges) -> str:
    """DOT rendering of a finite tree neighborhood; even and odd vertices
    are drawn in different shapes."""
    lines = ["graph bruhat_tits {"]
    ids = {v: i for i, v in enumerate(vertices)}
    for v, i in ids.items():
        shape = "circle" if v.parity == 0 else "box"
        lines.append(f'  n{i} [label="{v.x}@{v.n}" shape={shape}];')
    for a, b in edges:
        lines.append(f"  n{ids[a]} -- n{ids[b]};")
    lines.append("}")
    return "\n".join(lines)

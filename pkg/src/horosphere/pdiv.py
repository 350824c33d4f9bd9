"""Curves, colored polyhedral divisors and G-valuations.

Rational functions on the curve never appear explicitly: every formula here
only consumes their divisors, so a :class:`BEigenfunction` is a weight
``m`` together with ``div f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Iterable, Mapping, Sequence

from .lattice import lcm_denominators, primitive
from .polyhedra import NEG_INF, Cone, Polyhedron, dot
from .rootdata import Color, HorosphericalDatum, levi_subset, weyl_dim

Point = str
INFINITY = "inf"


class DivisorError(ValueError):
    """A polyhedral divisor violates its defining conditions or an operation's precondition."""


@dataclass(frozen=True)
class CurveWithOpen:
    """A smooth projective curve ``C`` with an open subset ``C_0 = C minus removed``.

    ``genus == 0`` is the projective line.  Points are opaque string labels.
    """

    genus: int = 0
    removed: frozenset[Point] = frozenset()

    def __post_init__(self):
        if self.genus < 0:
            raise DivisorError("genus must be nonnegative")
        object.__setattr__(self, "removed", frozenset(str(p) for p in self.removed))

    @classmethod
    def projective_line(cls, removed: Iterable[Point] = ()) -> "CurveWithOpen":
        return cls(0, frozenset(removed))

    @property
    def is_affine(self) -> bool:
        return bool(self.removed)

    @property
    def is_projective(self) -> bool:
        return not self.removed

    @property
    def is_rational(self) -> bool:
        return self.genus == 0

    @property
    def canonical_degree(self) -> int:
        return 2 * self.genus - 2

    def contains(self, z: Point) -> bool:
        return z not in self.removed

    def restrict(self, more: Iterable[Point]) -> "CurveWithOpen":
        return CurveWithOpen(self.genus, self.removed | frozenset(more))

    def __str__(self) -> str:
        name = "P1" if self.genus == 0 else f"C(g={self.genus})"
        return name if not self.removed else f"{name} - {{{', '.join(sorted(self.removed))}}}"


class CurveQDivisor(Mapping[Point, Fraction]):
    """A finite formal sum of points with rational coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coefficients: Mapping[Point, object] | Iterable[tuple[Point, object]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        c: dict[Point, Fraction] = {}
        for z, a in items:
            c[str(z)] = c.get(str(z), Fraction(0)) + Fraction(a)
        self._c = {z: a for z, a in sorted(c.items()) if a != 0}

    def __getitem__(self, z: Point) -> Fraction:
        return self._c[z]

    def __iter__(self):
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def coefficient(self, z: Point) -> Fraction:
        return self._c.get(z, Fraction(0))

    @property
    def degree(self) -> Fraction:
        return sum(self._c.values(), Fraction(0))

    @property
    def support(self) -> frozenset[Point]:
        return frozenset(self._c)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self._c.values())

    def floor(self) -> "CurveQDivisor":
        return CurveQDivisor({z: floor(a) for z, a in self._c.items()})

    def restrict(self, curve: CurveWithOpen) -> "CurveQDivisor":
        return CurveQDivisor({z: a for z, a in self._c.items() if curve.contains(z)})

    def is_effective(self) -> bool:
        return all(a >= 0 for a in self._c.values())

    def __add__(self, other: "CurveQDivisor") -> "CurveQDivisor":
        return CurveQDivisor(list(self._c.items()) + list(other._c.items()))

    def __neg__(self) -> "CurveQDivisor":
        return CurveQDivisor({z: -a for z, a in self._c.items()})

    def __sub__(self, other: "CurveQDivisor") -> "CurveQDivisor":
        return self + (-other)

    def scale(self, k) -> "CurveQDivisor":
        return CurveQDivisor({z: k * a for z, a in self._c.items()})

    def __le__(self, other: "CurveQDivisor") -> bool:
        return (other - self).is_effective()

    def __eq__(self, other) -> bool:
        if isinstance(other, CurveQDivisor):
            return self._c == other._c
        if isinstance(other, Mapping):
            return self == CurveQDivisor(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._c.items()))

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        return " + ".join(f"{a}*[{z}]" for z, a in self._c.items())


def floor_divisor(D: CurveQDivisor) -> CurveQDivisor:
    return D.floor()


@dataclass(frozen=True)
class BEigenfunction:
    """The function ``f chi^m``, recorded through ``m`` and ``div f``."""

    m: tuple[int, ...]
    div_f: CurveQDivisor = field(default_factory=CurveQDivisor)

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        div = self.div_f if isinstance(self.div_f, CurveQDivisor) else CurveQDivisor(self.div_f)
        if not div.is_integral():
            raise DivisorError("div f must have integer coefficients")
        object.__setattr__(self, "div_f", div)

    def ord(self, z: Point) -> int:
        return int(self.div_f.coefficient(z))


@dataclass(frozen=True)
class GValuation:
    """The valuation ``(z, v, l)``; when ``l == 0`` the point plays no role."""

    point: Point | None
    v: tuple[Fraction, ...]
    l: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(Fraction(x) for x in self.v))
        object.__setattr__(self, "l", Fraction(self.l))
        if self.l < 0:
            raise DivisorError("the level of a G-valuation is nonnegative")
        if self.l == 0:
            object.__setattr__(self, "point", None)
        elif self.point is None:
            raise DivisorError("a G-valuation of positive level needs a point")

    def apply(self, terms: Sequence[BEigenfunction]) -> Fraction:
        return gvaluation_apply(self, terms)


def gvaluation_apply(u: GValuation, terms: Sequence[BEigenfunction]) -> Fraction:
    """``min_i <m_i, v> + l * ord_z f_i`` over the terms of ``sum f_i chi^m_i``."""
    if not terms:
        raise DivisorError("valuation of the zero function")
    ms = [t.m for t in terms]
    if len(set(ms)) != len(ms):
        raise DivisorError("terms must have pairwise distinct weights")
    return min(dot(t.m, u.v) + (u.l * t.ord(u.point) if u.l else 0) for t in terms)


@dataclass(frozen=True)
class ProperCertificate:
    proper: bool
    reason: str
    degree_vertices: tuple[tuple[Fraction, ...], ...] = ()
    zero_face_generators: tuple[tuple[int, ...], ...] = ()
    assumed_principal: bool = False

    def __bool__(self) -> bool:
        return self.proper


@dataclass(frozen=True)
class Vertex:
    """A pair ``(z, v)`` with ``v`` a vertex of ``Delta_z``, and ``mu(v)``."""

    point: Point
    v: tuple[Fraction, ...]

    @property
    def mu(self) -> int:
        return lcm_denominators(self.v)

    @property
    def primitive(self) -> tuple[int, ...]:
        """Primitive generator ``mu(v) (v, 1)`` of the vertical ray."""
        return tuple(int(self.mu * x) for x in self.v) + (self.mu,)

    def sort_key(self):
        return (self.point, self.v)

    def label(self) -> str:
        return f"D_({self.point},{'/'.join(map(str, self.v)) if len(self.v) == 1 else self.v})"

    def __repr__(self) -> str:
        coords = ", ".join(str(x) for x in self.v)
        return f"Vertex({self.point}, ({coords}))"


class ColoredPolyhedralDivisor:
    """A colored ``sigma``-polyhedral divisor ``(D, F)`` on an open curve.

    ``coeffs`` maps points of ``C_0`` to polyhedra with tail ``sigma``; omitted
    points (and entries equal to ``sigma``) are trivial and are dropped.
    """

    __slots__ = ("base", "tail", "coeffs", "colors", "__dict__")

    def __init__(
        self,
        base: CurveWithOpen,
        tail: Cone,
        coeffs: Mapping[Point, Polyhedron] | None = None,
        colors: Iterable[Color] = (),
    ):
        coeffs = dict(coeffs or {})
        if not tail.is_strongly_convex():
            raise DivisorError("tail cone must be strongly convex")
        for z, P in coeffs.items():
            if P.tail != tail:
                raise DivisorError(f"coefficient at {z} has tail {P.tail}, expected {tail}")
            if not base.contains(z):
                raise DivisorError(f"coefficient at {z}, which is not in C_0")
        colors = frozenset(colors)
        for c in colors:
            if len(c.image) != tail.ambient_rank:
                raise DivisorError(f"color {c.alpha} has image of the wrong rank")
            if not any(c.image):
                raise DivisorError(f"color {c.alpha} has image 0")
            if not tail.contains(c.image):
                raise DivisorError(f"color image {c.image} of {c.alpha} is not in the tail cone")
        self.base = base
        self.tail = tail
        self.coeffs: dict[Point, Polyhedron] = {z: P for z, P in sorted(coeffs.items()) if not P.is_trivial()}
        self.colors: frozenset[Color] = colors

    @property
    def rank(self) -> int:
        return self.tail.ambient_rank

    @property
    def special_points(self) -> tuple[Point, ...]:
        return tuple(self.coeffs)

    def coefficient(self, z: Point) -> Polyhedron:
        if not self.base.contains(z):
            raise DivisorError(f"{z} is not in C_0")
        return self.coeffs.get(z) or Polyhedron.trivial(self.tail)

    def sorted_colors(self) -> tuple[Color, ...]:
        return tuple(sorted(self.colors, key=lambda c: (int(c.alpha[5:]) if c.alpha[5:].isdigit() else 0, c.alpha)))

    def with_colors(self, colors: Iterable[Color]) -> "ColoredPolyhedralDivisor":
        return ColoredPolyhedralDivisor(self.base, self.tail, self.coeffs, colors)

    def key(self):
        return (
            self.base.genus,
            tuple(sorted(self.base.removed)),
            self.tail.rays,
            tuple((z, P.vertices) for z, P in self.coeffs.items()),
            tuple(sorted((c.alpha, c.image) for c in self.colors)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredPolyhedralDivisor):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        parts = ", ".join(f"{z}: {list(P.vertices)}" for z, P in self.coeffs.items())
        cols = ", ".join(c.alpha for c in self.sorted_colors())
        return f"CPD(base={self.base}, tail={self.tail!r}, coeffs={{{parts}}}, colors={{{cols}}})"

    # -- evaluation --------------------------------------------------------

    def evaluate(self, m: Sequence[int]) -> CurveQDivisor:
        return evaluate(self, m)

    def slice(self, z: Point) -> Cone:
        return slice_cone(self, z)

    @cached_property
    def generic_slice(self) -> Cone:
        return Cone.from_generators([r + (0,) for r in self.tail.rays] + [(0,) * self.rank + (1,)], self.rank + 1)


def evaluate(D: ColoredPolyhedralDivisor, m: Sequence[int]) -> CurveQDivisor:
    """``D(m) = sum_z min_{v in Delta_z} <m, v> [z]``."""
    if len(m) != D.rank:
        raise DivisorError(f"weight of length {len(m)} for a rank {D.rank} divisor")
    out = {}
    for z, P in D.coeffs.items():
        val = P.support_value(m)
        if val is NEG_INF:
            raise DivisorError(f"{tuple(m)} is not in the dual of the tail cone")
        out[z] = val
    if any(dot(m, r) < 0 for r in D.tail.rays):
        raise DivisorError(f"{tuple(m)} is not in the dual of the tail cone")
    return CurveQDivisor(out)


def degree_polytope(D: ColoredPolyhedralDivisor) -> Polyhedron:
    if not D.base.is_projective:
        raise DivisorError("the degree polyhedron is defined for projective C_0")
    total = Polyhedron.trivial(D.tail)
    for P in D.coeffs.values():
        total = total + P
    return total


def is_proper(D: ColoredPolyhedralDivisor) -> ProperCertificate:
    if D.base.is_affine:
        return ProperCertificate(True, "C_0 is affine")
    deg = degree_polytope(D)
    if not all(D.tail.contains(v) for v in deg.vertices):
        return ProperCertificate(False, "deg D is not contained in the tail cone", deg.vertices)
    if deg.contains((0,) * D.rank):
        return ProperCertificate(False, "deg D equals the tail cone", deg.vertices)
    # weights where min over deg D vanishes: union of the faces dual(sigma) cap v^perp
    dual = D.tail.dual()
    gens = set()
    for v in deg.vertices:
        face = dual.intersect(Cone.from_hrep([], [primitive(v)], D.rank))
        gens.update(face.generators)
    gens = tuple(sorted(gens))
    # on P1 each D(m) on that face has degree 0, hence is Q-principal
    assumed = D.base.genus > 0 and bool(gens)
    reason = "deg D is a proper subset of the tail cone"
    if assumed:
        reason += "; degree-0 divisors on the zero-min face assumed Q-principal"
    return ProperCertificate(True, reason, deg.vertices, gens, assumed)


def localize(D: ColoredPolyhedralDivisor, w: Sequence[int], f: BEigenfunction) -> ColoredPolyhedralDivisor:
    """The localization ``D_f^w`` at the section ``f chi^w``."""
    w = tuple(int(x) for x in w)
    if f.m != w:
        raise DivisorError(f"f has weight {f.m}, expected {w}")
    if any(dot(w, r) < 0 for r in D.tail.rays):
        raise DivisorError(f"{w} is not in the dual of the tail cone")
    if D.base.is_projective and D.base.genus == 0 and f.div_f.degree != 0:
        raise DivisorError("div f on the projective line must have degree 0")
    E = (f.div_f + evaluate(D, w)).restrict(D.base)
    if not E.is_effective():
        raise DivisorError(f"f chi^w is not a section: div f + D(w) = {E}")
    Z = E.support
    base = D.base.restrict(Z)
    tail = Cone.from_generators([r for r in D.tail.rays if dot(w, r) == 0], D.rank)
    coeffs = {z: P.face(w) for z, P in D.coeffs.items() if z not in Z}
    cols = [c for c in D.colors if dot(w, c.image) == 0]
    return ColoredPolyhedralDivisor(base, tail, coeffs, cols)


def slice_cone(D: ColoredPolyhedralDivisor, z: Point) -> Cone:
    """``cone(sigma x 0, Delta_z x 1)`` inside ``N_Q x Q``."""
    if not D.base.contains(z):
        raise DivisorError(f"{z} is not in C_0")
    P = D.coeffs.get(z)
    return P.homogenized if P is not None else D.generic_slice


def vertices(D: ColoredPolyhedralDivisor) -> list[Vertex]:
    return [Vertex(z, v) for z, P in D.coeffs.items() for v in P.vertices]


def _ray_meets(deg: Polyhedron, rho: Sequence[int]) -> bool:
    d = deg.ambient_rank
    line = Cone.from_generators([tuple(rho) + (0,), (0,) * d + (1,)], d + 1)
    both = deg.homogenized.intersect(line)
    return any(r[-1] > 0 for r in both.rays)


def rays(D: ColoredPolyhedralDivisor) -> list[tuple[int, ...]]:
    """Extremal rays of the tail cone that carry a G-stable prime divisor."""
    out = []
    deg = degree_polytope(D) if D.base.is_projective else None
    for r in D.tail.rays:
        if any(primitive(c.image) == r for c in D.colors):
            continue
        if deg is not None and _ray_meets(deg, r):
            continue
        out.append(r)
    return out


def vertices_and_rays(D: ColoredPolyhedralDivisor) -> tuple[list[Vertex], list[tuple[int, ...]]]:
    cert = is_proper(D)
    if not cert:
        raise DivisorError(f"improper divisor: {cert.reason}")
    return vertices(D), rays(D)


def graded_dim(D: ColoredPolyhedralDivisor, m: Sequence[int]) -> int:
    """``dim H^0(P1, O(floor D(m)))`` for a divisor on the whole projective line."""
    if not D.base.is_projective:
        raise DivisorError("graded pieces over an affine curve are infinite dimensional")
    if D.base.genus != 0:
        raise DivisorError("graded dimension needs Riemann-Roch data beyond genus 0")
    deg = evaluate(D, m).floor().degree
    return max(0, int(deg) + 1)


def hilbert_coefficient(datum: HorosphericalDatum, D: ColoredPolyhedralDivisor, m: Sequence[int]) -> int:
    """Dimension of the weight-``m`` isotypic piece: sections times ``dim V(m)``."""
    levi = levi_subset(datum, D.colors)
    return graded_dim(D, m) * weyl_dim(datum, m, levi)


def trivial_divisor(base: CurveWithOpen, tail: Cone, colors: Iterable[Color] = ()) -> ColoredPolyhedralDivisor:
    return ColoredPolyhedralDivisor(base, tail, {}, colors)


def interval(lo, tail: Cone | None = None) -> Polyhedron:
    """The rank-one polyhedron ``[lo, +inf)``."""
    return Polyhedron([(Fraction(lo),)], tail or Cone.orthant(1))

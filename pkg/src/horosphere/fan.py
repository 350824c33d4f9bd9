"""Colored divisorial fans.

A fan is a finite list of colored polyhedral divisors over a common curve.
Everything pointwise on the curve is decided at finitely many *relevant*
points (special points of some item and removed points of some chart) plus
one symbolic generic point :data:`GENERIC`, where every item has the slice
``cone(sigma x 0, (0, 1))``.

At a point ``z`` outside ``C_0`` an item contributes only its tail
``sigma x 0`` (valuations of level zero do not see the point); this is the
convention used by :meth:`DivisorialFan.hyper_slice`.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .pdiv import (
    ColoredPolyhedralDivisor,
    CurveWithOpen,
    DivisorError,
    Point,
    Vertex,
    degree_polytope,
    is_proper,
    rays as divisor_rays,
    slice_cone,
    _ray_meets,
)
from .polyhedra import Cone, Polyhedron, _ray_order_key, dot, pulling_triangulation, stellar_step, stellar_subdivide, _maximal_only
from .rootdata import Color, HorosphericalDatum

log = logging.getLogger(__name__)

GENERIC = "*"
CHART_POINTS = ("0", "inf")


class FanError(ValueError):
    """The collection of divisors is not a colored divisorial fan."""


@dataclass(frozen=True)
class FanCheck:
    ok: bool
    pair: tuple[int, int] | None = None
    point: Point | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class DivisorialFan:
    """A finite coherent family of colored polyhedral divisors."""

    def __init__(self, items: Iterable[ColoredPolyhedralDivisor], datum: HorosphericalDatum | None = None):
        self.items: tuple[ColoredPolyhedralDivisor, ...] = tuple(items)
        if not self.items:
            raise FanError("a fan needs at least one item")
        ranks = {D.rank for D in self.items}
        genera = {D.base.genus for D in self.items}
        if len(ranks) != 1 or len(genera) != 1:
            raise FanError("fan items must share the lattice N and the curve C")
        self.datum = datum

    @property
    def rank(self) -> int:
        return self.items[0].rank

    @property
    def genus(self) -> int:
        return self.items[0].base.genus

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __repr__(self) -> str:
        return f"DivisorialFan({list(self.items)!r})"

    def key(self):
        return tuple(sorted(D.key() for D in self.items))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DivisorialFan):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    @property
    def special_points(self) -> tuple[Point, ...]:
        return tuple(sorted({z for D in self.items for z in D.coeffs}))

    @property
    def relevant_points(self) -> tuple[Point, ...]:
        pts = {z for D in self.items for z in D.coeffs}
        pts |= {z for D in self.items for z in D.base.removed}
        return tuple(sorted(pts))

    def contains(self, i: int, z: Point) -> bool:
        return z == GENERIC or self.items[i].base.contains(z)

    def slice(self, i: int, z: Point) -> Cone | None:
        D = self.items[i]
        if z == GENERIC:
            return D.generic_slice
        return slice_cone(D, z) if D.base.contains(z) else None

    def hyper_slice(self, i: int, z: Point) -> Cone:
        s = self.slice(i, z)
        if s is not None:
            return s
        D = self.items[i]
        return Cone.from_generators([r + (0,) for r in D.tail.rays], D.rank + 1)

    @property
    def curve_union_removed(self) -> frozenset[Point]:
        """Points of ``C`` outside ``C_Sigma``."""
        out = None
        for D in self.items:
            out = D.base.removed if out is None else out & D.base.removed
        return frozenset(out)


def embed_color(c: Color) -> tuple[int, ...]:
    return tuple(c.image) + (0,)


def _colors_in(colors: Iterable[Color], cone: Cone) -> frozenset[Color]:
    return frozenset(c for c in colors if cone.contains(embed_color(c)))


def validate_fan(fan: DivisorialFan, require_closure: bool = True) -> FanCheck:
    """Check coherence of every pair of items.

    Pairwise: at every relevant point and at the generic point the two
    hypercone slices meet in a common face, with matching colors.  With
    ``require_closure`` the intersection must moreover be the hypercone of an
    item of the fan.
    """
    pts = fan.relevant_points + (GENERIC,)
    table = {(i, z): fan.hyper_slice(i, z) for i in range(len(fan)) for z in pts}
    for i, D in enumerate(fan.items):
        cert = is_proper(D)
        if not cert:
            return FanCheck(False, (i, i), None, f"item {i} is not proper: {cert.reason}")
    for i, j in itertools.combinations_with_replacement(range(len(fan)), 2):
        if i == j:
            continue
        Fi, Fj = fan.items[i].colors, fan.items[j].colors
        meet = {}
        for z in pts:
            a, b = table[i, z], table[j, z]
            k = a.intersect(b)
            if not k.is_face_of(a) or not k.is_face_of(b):
                return FanCheck(False, (i, j), z, "slices do not meet in a common face")
            if _colors_in(Fi, k) != _colors_in(Fj, k):
                return FanCheck(False, (i, j), z, "colors of the common face disagree")
            meet[z] = k
        if require_closure:
            cols = _colors_in(Fi, meet[GENERIC])
            if not any(
                all(table[l, z] == meet[z] for z in pts) and fan.items[l].colors == cols
                for l in range(len(fan))
            ):
                return FanCheck(False, (i, j), None, "the intersection is not an item of the fan")
    return FanCheck(True)


def polyhedron_from_slice(k: Cone) -> Polyhedron:
    """Level-one section of a cone in ``N x Q`` lying in the upper half space."""
    d = k.ambient_rank - 1
    tail = Cone.from_generators([r[:-1] for r in k.rays if r[-1] == 0], d)
    verts = [tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in k.rays if r[-1] > 0]
    if not verts:
        raise FanError(f"{k} has no point above level 0")
    return Polyhedron(verts, tail)


def intersection_item(fan: DivisorialFan, i: int, j: int) -> ColoredPolyhedralDivisor:
    """The colored divisor whose hypercone is the intersection of those of items ``i`` and ``j``."""
    Di = fan.items[i]
    pts = fan.relevant_points
    gen = fan.hyper_slice(i, GENERIC).intersect(fan.hyper_slice(j, GENERIC))
    tail = Cone.from_generators([r[:-1] for r in gen.rays if r[-1] == 0], fan.rank)
    coeffs, removed = {}, set()
    for z in pts:
        k = fan.hyper_slice(i, z).intersect(fan.hyper_slice(j, z))
        if all(r[-1] == 0 for r in k.rays):
            removed.add(z)
            continue
        P = polyhedron_from_slice(k)
        if P.tail != tail:
            raise FanError("intersection slice with inconsistent tail")
        coeffs[z] = P
    base = CurveWithOpen(Di.base.genus, frozenset(removed))
    return ColoredPolyhedralDivisor(base, tail, coeffs, _colors_in(Di.colors, gen))


def saturate(fan: DivisorialFan) -> DivisorialFan:
    """Add the missing pairwise intersection items until the family is closed."""
    items = list(dict.fromkeys(fan.items))
    keys = set(items)
    # intersections never create new relevant points, so one pass over a
    # growing list visits every pair exactly once
    j = 1
    while j < len(items):
        cur = DivisorialFan(items, fan.datum)
        for i in range(j):
            new = intersection_item(cur, i, j)
            if new not in keys:
                items.append(new)
                keys.add(new)
        j += 1
    return DivisorialFan(sorted(items, key=ColoredPolyhedralDivisor.key), fan.datum)


def _covers_half_space(cones: Sequence[Cone], d: int) -> bool:
    """Whether a face-compatible family covers ``{x in Q^d : x_d >= 0}``."""
    full = {c for c in cones if c.dim == d}
    if not full:
        return False
    facet_count: dict[Cone, int] = {}
    for c in full:
        for f in c.facets():
            facet_count[f] = facet_count.get(f, 0) + 1
    for f, n in facet_count.items():
        on_boundary = all(r[-1] == 0 for r in f.rays)
        if not on_boundary and n < 2:
            return False
    return True


def is_complete(fan: DivisorialFan) -> bool:
    check = validate_fan(fan, require_closure=False)
    if not check:
        raise FanError(f"invalid fan: {check.reason} at {check.pair}, {check.point}")
    if fan.curve_union_removed:
        return False
    for z in fan.relevant_points + (GENERIC,):
        cones = list({fan.slice(i, z) for i in range(len(fan)) if fan.contains(i, z)})
        if not _covers_half_space(cones, fan.rank + 1):
            return False
    return True


# ---------------------------------------------------------------------------
# Vert, Ray and germs
# ---------------------------------------------------------------------------

def fan_vertices(fan: DivisorialFan) -> list[Vertex]:
    """``Vert(Sigma)``: vertices of all items at the special points of the fan."""
    out = set()
    for z in fan.special_points:
        for D in fan.items:
            if D.base.contains(z):
                for v in D.coefficient(z).vertices:
                    out.add(Vertex(z, v))
    return sorted(out, key=Vertex.sort_key)


def fan_rays(fan: DivisorialFan) -> list[tuple[int, ...]]:
    """``Ray(Sigma)``: tail rays that carry a G-stable prime divisor in some item."""
    return sorted({r for D in fan.items for r in divisor_rays(D)})


@dataclass(frozen=True)
class GermDatum:
    """Colored datum of a germ.

    ``kind`` is ``"horizontal"`` (a face of a tail cone, in ``N``),
    ``"vertical"`` (a slice face at ``point`` not contained in level 0, in
    ``N x Q``) or ``"hyper"`` (the whole hypercone of an item over a
    projective curve).  ``point == GENERIC`` stands for the family over all
    non-special points.
    """

    kind: str
    cone: Cone
    colors: frozenset[str]
    item: int
    point: Point | None = None
    is_divisorial: bool = False
    flags: tuple[str, ...] = ()

    def key(self):
        return (self.kind, self.point or "", self.cone.dim, self.cone.rays, tuple(sorted(self.colors)))


def enumerate_germs(fan: DivisorialFan) -> list[GermDatum]:
    for i, D in enumerate(fan.items):
        cert = is_proper(D)
        if not cert:
            raise FanError(f"item {i} is not proper: {cert.reason}")
    seen: dict[tuple, GermDatum] = {}

    def add(g: GermDatum):
        k = g.key()
        if k not in seen:
            seen[k] = g

    points = fan.special_points + (GENERIC,)
    for i, D in enumerate(fan.items):
        deg = degree_polytope(D) if D.base.is_projective else None
        for f in D.tail.faces():
            if f.dim == 0:
                continue
            cols = frozenset(c.alpha for c in D.colors if f.contains(c.image))
            flags = ()
            if deg is not None and _face_meets(deg, f):
                flags = ("ambiguous-case-B",)
            divisorial = f.dim == 1 and not cols and not flags
            add(GermDatum("horizontal", f, cols, i, None, divisorial, flags))
        for z in points:
            if not fan.contains(i, z):
                continue
            s = fan.slice(i, z)
            for f in s.faces():
                if all(r[-1] == 0 for r in f.rays):
                    continue
                cols = frozenset(c.alpha for c in D.colors if f.contains(embed_color(c)))
                divisorial = f.dim == 1 and not cols
                add(GermDatum("vertical", f, cols, i, z, divisorial))
        if D.base.is_projective:
            add(GermDatum("hyper", D.tail, frozenset(c.alpha for c in D.colors), i, None, False, ("case-B",)))
    return sorted(seen.values(), key=GermDatum.key)


def _face_meets(deg: Polyhedron, face: Cone) -> bool:
    d = deg.ambient_rank
    lift = Cone.from_generators([r + (0,) for r in face.rays] + [(0,) * d + (1,)], d + 1)
    both = deg.homogenized.intersect(lift)
    return any(r[-1] > 0 for r in both.rays)


def germ_vertex(g: GermDatum) -> Vertex | None:
    if g.kind != "vertical" or g.cone.dim != 1 or g.point == GENERIC:
        return None
    (r,) = g.cone.rays
    return Vertex(g.point, tuple(Fraction(x, r[-1]) for x in r[:-1]))


# ---------------------------------------------------------------------------
# Decoloration and resolution
# ---------------------------------------------------------------------------

def decolor(fan: DivisorialFan) -> DivisorialFan:
    return DivisorialFan([D.with_colors(()) for D in fan.items], fan.datum)


def decolor_germ(g: GermDatum) -> GermDatum:
    divisorial = g.cone.dim == 1 and g.kind in ("horizontal", "vertical") and "ambiguous-case-B" not in g.flags
    return GermDatum(g.kind, g.cone, frozenset(), g.item, g.point, divisorial, g.flags)


def restrict_divisor(D: ColoredPolyhedralDivisor, removed: Iterable[Point]) -> ColoredPolyhedralDivisor:
    base = D.base.restrict(removed)
    return ColoredPolyhedralDivisor(base, D.tail, {z: P for z, P in D.coeffs.items() if base.contains(z)}, D.colors)


def toroidal_cover(fan: DivisorialFan) -> DivisorialFan:
    """``Sigma_tor``: decolor and replace projective items by their two standard affine charts."""
    items = []
    for D in decolor(fan).items:
        if D.base.is_projective:
            if D.base.genus:
                raise FanError("affine chart cover is implemented for the projective line only")
            items.append(restrict_divisor(D, [CHART_POINTS[1]]))
            items.append(restrict_divisor(D, [CHART_POINTS[0]]))
        else:
            items.append(D)
    return saturate(DivisorialFan(items, fan.datum))


@dataclass(frozen=True)
class Resolution:
    fan: DivisorialFan
    exceptional_rays: tuple[tuple[int, ...], ...]
    exceptional_vertices: tuple[Vertex, ...]
    decolored_germs: tuple[tuple[GermDatum, GermDatum], ...] = ()


def _refine_pointwise(fan: DivisorialFan) -> dict[Point, set]:
    points = fan.relevant_points + (GENERIC,)
    simplices: dict[Point, set] = {}
    for z in points:
        acc = set()
        for i in range(len(fan)):
            if fan.contains(i, z):
                acc.update(pulling_triangulation(fan.slice(i, z), _ray_order_key))
        simplices[z] = _maximal_only(acc)
    while True:
        best = None
        for z in points:
            step = stellar_step(simplices[z])
            if step is None:
                continue
            p, support = step
            cand = (_mult_of(simplices[z], support), support, z, p)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            return simplices
        _, support, z, p = best
        targets = points if p[-1] == 0 else (z,)
        log.debug("stellar subdivision at %s (point %s)", p, z)
        for t in targets:
            simplices[t] = stellar_subdivide(simplices[t], p, support)


def _mult_of(simplices, support) -> int:
    from .polyhedra import _simplex_multiplicity

    return min(_simplex_multiplicity(s) for s in simplices if set(support) <= set(s))


def _simplex_faces(simplices) -> set[tuple]:
    out = set()
    for s in simplices:
        for k in range(len(s) + 1):
            out.update(itertools.combinations(s, k))
    return out


def _is_resolved(fan: DivisorialFan) -> bool:
    """All items affine with regular slices; colors are ignored."""
    if any(D.base.is_projective for D in fan.items):
        return False
    return all(fan.slice(i, z).is_regular()
               for i in range(len(fan))
               for z in fan.items[i].special_points + (GENERIC,))


def resolve(fan: DivisorialFan) -> Resolution:
    """Regular refinement of the toroidal cover of ``fan``.

    The result has every slice regular and no colors; the exceptional lists
    are the new rays and vertices.  A fan that is already affine and regular
    is only decolored (and returned unchanged when it has no colors).

    After refining every slice (level-zero subdivisions are applied at all
    points at once, so the level-zero fans agree everywhere), the closed
    family is written down directly: an item for each face with a vertex
    above level zero at a relevant point ``z``, living over ``C`` minus the
    other relevant points, and an item for each level-zero face over ``C``
    minus all relevant points.
    """
    for i, D in enumerate(fan.items):
        if not is_proper(D):
            raise FanError(f"item {i} is not proper")
    germ_map = tuple((g, decolor_germ(g)) for g in enumerate_germs(fan) if g.colors)
    if _is_resolved(fan):
        out = decolor(fan)
    else:
        out = _resolved_family(fan)
    old_rays, old_verts = set(fan_rays(fan)), set(fan_vertices(fan))
    new_rays = tuple(r for r in fan_rays(out) if r not in old_rays)
    new_verts = tuple(v for v in fan_vertices(out) if v not in old_verts)
    return Resolution(out, new_rays, new_verts, germ_map)


def _resolved_family(fan: DivisorialFan) -> DivisorialFan:
    tor = toroidal_cover(fan)
    refined = _refine_pointwise(tor)
    relevant = frozenset(tor.relevant_points)
    genus = tor.genus
    d = tor.rank
    items = []
    for z, simplices in refined.items():
        for s in sorted(_simplex_faces(simplices)):
            k = Cone.from_generators(s, d + 1)
            if z == GENERIC:
                if any(r[-1] for r in k.rays):
                    continue
                tail = Cone.from_generators([r[:-1] for r in k.rays], d)
                items.append(ColoredPolyhedralDivisor(CurveWithOpen(genus, relevant), tail, {}, ()))
            else:
                if all(r[-1] == 0 for r in k.rays):
                    continue
                P = polyhedron_from_slice(k)
                base = CurveWithOpen(genus, relevant - {z})
                items.append(ColoredPolyhedralDivisor(base, P.tail, {z: P}, ()))
    return DivisorialFan(sorted(set(items), key=ColoredPolyhedralDivisor.key), fan.datum)

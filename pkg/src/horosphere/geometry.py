"""Geometric invariants and singularity criteria of complexity-one models.

The functions here take a :class:`~horosphere.fan.DivisorialFan` (or, for the
criteria stated for a single simple model, a
:class:`~horosphere.pdiv.ColoredPolyhedralDivisor`) together with the
horospherical datum ``(M, I)`` stored on the fan.

Divisors are expressed on the B-stable prime divisors: ``D_(z,v)`` for
``(z, v)`` in ``Vert``, ``D_rho`` for ``rho`` in ``Ray`` and the colors
``D_alpha``.  Vertical divisors ``D_(z,0)`` over non-special points of the
curve are kept in a separate ``curve`` part, which is how their classes are
routed through ``Cl(C_Sigma)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .fan import (
    GENERIC,
    DivisorialFan,
    FanError,
    Resolution,
    embed_color,
    fan_rays,
    fan_vertices,
    resolve,
)
from .lattice import (
    AbelianGroupPresentation,
    IntMatrix,
    cokernel,
    lcm_denominators,
    min_integral_multiple_sparse,
    primitive,
    solve_integer,
)
from .pdiv import (
    INFINITY,
    BEigenfunction,
    ColoredPolyhedralDivisor,
    CurveQDivisor,
    DivisorError,
    Point,
    Vertex,
    degree_polytope,
    evaluate,
    is_proper,
    rays as divisor_rays,
)
from .polyhedra import Cone, _box_points, dot, normal_quasifan, pulling_triangulation
from .rootdata import Color, HorosphericalDatum, a_alpha, colors as datum_colors, weyl_order


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDED = "undecided"

    def __bool__(self) -> bool:
        if self is Verdict.UNDECIDED:
            raise ValueError("an undecided verdict has no truth value")
        return self is Verdict.TRUE

    @classmethod
    def of(cls, flag: bool) -> "Verdict":
        return cls.TRUE if flag else cls.FALSE


def as_fan(obj, datum: HorosphericalDatum | None = None) -> DivisorialFan:
    if isinstance(obj, DivisorialFan):
        return obj
    if isinstance(obj, ColoredPolyhedralDivisor):
        return DivisorialFan([obj], datum)
    raise TypeError(f"expected a fan or a colored polyhedral divisor, got {type(obj).__name__}")


def _datum(fan: DivisorialFan, datum: HorosphericalDatum | None = None) -> HorosphericalDatum:
    d = datum or fan.datum
    if d is None:
        raise FanError("this operation needs the horospherical datum (M, I)")
    if d.rank != fan.rank:
        raise FanError(f"datum has rank {d.rank} but the fan lives in rank {fan.rank}")
    return d


# ---------------------------------------------------------------------------
# B-stable divisors
# ---------------------------------------------------------------------------

def _clean(mapping: Mapping) -> dict:
    return {k: Fraction(v) for k, v in mapping.items() if Fraction(v) != 0}


@dataclass(frozen=True)
class BStableDivisor:
    """``sum a_(z,v) D_(z,v) + sum b_rho D_rho + sum c_alpha D_alpha + curve part``."""

    vert: Mapping[Vertex, Fraction] = field(default_factory=dict)
    ray: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)
    color: Mapping[str, Fraction] = field(default_factory=dict)
    curve: CurveQDivisor = field(default_factory=CurveQDivisor)

    def __post_init__(self):
        object.__setattr__(self, "vert", dict(sorted(_clean(self.vert).items(), key=lambda kv: kv[0].sort_key())))
        object.__setattr__(self, "ray", dict(sorted(_clean({tuple(k): v for k, v in self.ray.items()}).items())))
        object.__setattr__(self, "color", dict(sorted(_clean(self.color).items())))
        if not isinstance(self.curve, CurveQDivisor):
            object.__setattr__(self, "curve", CurveQDivisor(self.curve))

    def is_integral(self) -> bool:
        vals = list(self.vert.values()) + list(self.ray.values()) + list(self.color.values())
        return all(v.denominator == 1 for v in vals) and self.curve.is_integral()

    def scale(self, k) -> "BStableDivisor":
        k = Fraction(k)
        return BStableDivisor(
            {a: k * b for a, b in self.vert.items()},
            {a: k * b for a, b in self.ray.items()},
            {a: k * b for a, b in self.color.items()},
            self.curve.scale(k),
        )

    def __add__(self, other: "BStableDivisor") -> "BStableDivisor":
        def merge(x, y):
            out = dict(x)
            for k, v in y.items():
                out[k] = out.get(k, Fraction(0)) + v
            return out

        return BStableDivisor(merge(self.vert, other.vert), merge(self.ray, other.ray),
                              merge(self.color, other.color), self.curve + other.curve)

    def __neg__(self) -> "BStableDivisor":
        return self.scale(-1)

    def __sub__(self, other: "BStableDivisor") -> "BStableDivisor":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BStableDivisor):
            return NotImplemented
        return (self.vert, self.ray, self.color, self.curve) == (other.vert, other.ray, other.color, other.curve)

    def __hash__(self) -> int:
        return hash((tuple(self.vert.items()), tuple(self.ray.items()), tuple(self.color.items()), self.curve))

    def terms(self) -> list[tuple[str, Fraction]]:
        out = [(v.label(), c) for v, c in self.vert.items()]
        out += [(ray_label(r), c) for r, c in self.ray.items()]
        out += [(f"D_{a}", c) for a, c in self.color.items()]
        out += [(f"D_({z},0)", c) for z, c in self.curve.items()]
        return out

    def __str__(self) -> str:
        parts = []
        for name, c in self.terms():
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            elif c < 0:
                parts.append(f"- {-c}*{name}")
            else:
                parts.append(f"+ {c}*{name}")
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def ray_label(r: Sequence[int]) -> str:
    return "D_rho" + "(" + ",".join(str(x) for x in r) + ")"


def color_images(datum: HorosphericalDatum) -> dict[str, tuple[int, ...]]:
    return {c.alpha: c.image for c in datum_colors(datum)}


def fan_colors(fan: DivisorialFan) -> dict[str, tuple[int, ...]]:
    """``F_Sigma``: colors occurring in some item, with their images."""
    return {c.alpha: c.image for D in fan.items for c in D.colors}


def _point_in_C_sigma(fan: DivisorialFan, z: Point) -> bool:
    return z not in fan.curve_union_removed


def principal_divisor(fan: DivisorialFan, f: BEigenfunction, datum: HorosphericalDatum | None = None) -> BStableDivisor:
    """``div(f chi^m)`` on ``X(Sigma)``."""
    datum = _datum(fan, datum)
    m = f.m
    special = set(fan.special_points)
    vert = {v: v.mu * (dot(m, v.v) + f.ord(v.point)) for v in fan_vertices(fan)}
    ray = {r: dot(m, r) for r in fan_rays(fan)}
    color = {a: dot(m, img) for a, img in color_images(datum).items()}
    curve = {z: c for z, c in f.div_f.items() if z not in special and _point_in_C_sigma(fan, z)}
    return BStableDivisor(vert, ray, color, CurveQDivisor(curve))


# ---------------------------------------------------------------------------
# Class groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassGroup:
    presentation: AbelianGroupPresentation
    vertices: tuple[Vertex, ...]
    rays: tuple[tuple[int, ...], ...]
    colors: tuple[str, ...]
    has_point_class: bool
    symbolic: bool = False

    def __str__(self) -> str:
        if self.symbolic:
            gens = ", ".join(self.presentation.generator_labels)
            return f"(Cl(C) + Z<{gens}>) / {self.presentation.relations.rows} relations"
        return str(self.presentation)

    @property
    def free_rank(self) -> int:
        return self.presentation.free_rank

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.presentation.invariant_factors

    @property
    def is_trivial(self) -> bool:
        return self.presentation.is_trivial

    def coordinates(self, D: BStableDivisor) -> tuple[int, ...]:
        if self.symbolic:
            raise FanError("classes are not computable when Cl(C_Sigma) is not finitely generated")
        if not D.is_integral():
            raise DivisorError("class of a non-integral divisor")
        vec = [int(D.curve.degree)] if self.has_point_class else []
        extra = set(D.vert) - set(self.vertices)
        if extra:
            raise DivisorError(f"divisor involves vertices outside Vert: {sorted(map(repr, extra))}")
        vec += [int(D.vert.get(v, 0)) for v in self.vertices]
        vec += [int(D.ray.get(r, 0)) for r in self.rays]
        vec += [int(D.color.get(a, 0)) for a in self.colors]
        return tuple(vec)

    def class_of(self, D: BStableDivisor) -> tuple[int, ...]:
        return self.presentation.class_of(self.coordinates(D))

    def is_zero(self, D: BStableDivisor) -> bool:
        return self.presentation.is_zero(self.coordinates(D))


def _class_group(fan: DivisorialFan, ray_list, color_map: Mapping[str, tuple[int, ...]]) -> ClassGroup:
    verts = fan_vertices(fan)
    symbolic = fan.genus != 0
    # positive genus: one symbolic generator [z] per special point, standing
    # for its class in Cl(C_Sigma)
    if symbolic:
        point_labels = [f"[{z}]" for z in fan.special_points]
    else:
        point_labels = ["[pt]"] if not fan.curve_union_removed else []
    point_class = bool(point_labels)
    labels = point_labels + [v.label() for v in verts]
    labels += [ray_label(r) for r in ray_list] + [f"D_{a}" for a in color_map]
    off_v = len(point_labels)
    off_r = off_v + len(verts)
    off_c = off_r + len(ray_list)
    rows = []
    for zi, z in enumerate(fan.special_points):
        row = [0] * len(labels)
        if symbolic:
            row[zi] = 1
        elif point_class:
            row[0] = 1
        for k, v in enumerate(verts):
            if v.point == z:
                row[off_v + k] = -v.mu
        rows.append(row)
    for e in range(fan.rank):
        row = [0] * len(labels)
        for k, v in enumerate(verts):
            row[off_v + k] = int(v.mu * v.v[e])
        for k, r in enumerate(ray_list):
            row[off_r + k] = r[e]
        for k, img in enumerate(color_map.values()):
            row[off_c + k] = img[e]
        rows.append(row)
    pres = cokernel(IntMatrix(len(rows), len(labels), tuple(tuple(r) for r in rows)), labels)
    if symbolic:
        note = "symbolic: Cl(C_Sigma) is not finitely generated; [z] denotes the class of z in it"
        pres = replace(pres, notes=pres.notes + (note,))
    return ClassGroup(pres, tuple(verts), tuple(ray_list), tuple(color_map), point_class, symbolic)


def class_group(fan, datum: HorosphericalDatum | None = None) -> ClassGroup:
    """``Cl(X(Sigma))`` as a presentation on Vert, Ray and the colors."""
    fan = as_fan(fan, datum)
    return _class_group(fan, fan_rays(fan), color_images(_datum(fan, datum)))


def class_group_tvariety(fan, datum: HorosphericalDatum | None = None) -> ClassGroup:
    """``Cl(Y(Sigma))`` of the quotient by ``G``: no colors, rays not filtered by colors."""
    fan = as_fan(fan, datum)
    ray_set = set()
    for D in fan.items:
        ray_set.update(divisor_rays(D.with_colors(())))
    return _class_group(fan, sorted(ray_set), {})


@dataclass(frozen=True)
class FactorialityReport:
    factorial: bool
    class_group: str
    condition_i: bool | None = None
    condition_ii: dict[str, tuple[int, ...] | None] | None = None

    def __bool__(self) -> bool:
        return self.factorial


def is_factorial(fan, datum: HorosphericalDatum | None = None) -> FactorialityReport:
    fan = as_fan(fan, datum)
    if fan.genus != 0:
        raise FanError("factoriality is decided for rational curves only")
    cl = class_group(fan, datum)
    report = FactorialityReport(cl.is_trivial, str(cl))
    if len(fan) != 1:
        return report
    (D,) = fan.items
    return FactorialityReport(cl.is_trivial, str(cl), *factoriality_diagnostic(D, _datum(fan, datum)))


def factoriality_diagnostic(D: ColoredPolyhedralDivisor, datum: HorosphericalDatum):
    """The two conditions of the factoriality criterion for a single simple model.

    (i) ``Cl(Y)`` is generated by the ``Gamma_rho`` whose ray meets a color
    image.  (ii) for each color ``alpha`` an ``m_alpha`` with
    ``<m_alpha, rho(D_alpha)> = 1`` killing every other generator, solved over
    ``ZZ`` together with the orders of ``f_alpha`` at the special points.
    """
    fan = DivisorialFan([D], datum)
    cy = class_group_tvariety(fan)
    colored_rays = [r for r in cy.rays if any(primitive(c.image) == r for c in D.colors)]
    labels = cy.presentation.generator_labels
    extra = []
    for r in colored_rays:
        row = [0] * len(labels)
        row[labels.index(ray_label(r))] = 1
        extra.append(row)
    rel = [list(row) for row in cy.presentation.relations.entries] + extra
    cond_i = cokernel(IntMatrix(len(rel), len(labels), tuple(tuple(r) for r in rel)), labels).is_trivial

    verts = fan_vertices(fan)
    ray_list = fan_rays(fan)
    imgs = color_images(datum)
    points = list(fan.special_points)
    n = D.rank
    cond_ii: dict[str, tuple[int, ...] | None] = {}
    for alpha in imgs:
        rows, rhs = [], []
        nv = n + len(points)
        for beta, img in imgs.items():
            rows.append(list(img) + [0] * len(points))
            rhs.append(1 if beta == alpha else 0)
        for v in verts:
            row = [int(v.mu * x) for x in v.v] + [0] * len(points)
            row[n + points.index(v.point)] = v.mu
            rows.append(row)
            rhs.append(0)
        for r in ray_list:
            rows.append(list(r) + [0] * len(points))
            rhs.append(0)
        if D.base.is_projective:
            rows.append([0] * n + [1] * len(points))
            rhs.append(0)
        sol = solve_integer(IntMatrix(len(rows), nv, tuple(tuple(r) for r in rows)), rhs)
        cond_ii[alpha] = None if sol is None else tuple(sol[:n])
    return cond_i, cond_ii


# ---------------------------------------------------------------------------
# Canonical divisor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalDivisor:
    divisor: BStableDivisor
    K_C: CurveQDivisor
    note: str = ""


def default_canonical_curve_divisor(fan: DivisorialFan) -> tuple[CurveQDivisor, str]:
    """``-2 [inf]`` on the projective line, moved off the special points if needed."""
    if fan.genus != 0:
        raise FanError("a canonical divisor of the curve must be supplied for positive genus")
    if INFINITY not in fan.special_points:
        return CurveQDivisor({INFINITY: -2}), "K_C = -2[inf]"
    taken = set(fan.relevant_points)
    k = 0
    while f"p{k}" in taken:
        k += 1
    z = f"p{k}"
    return CurveQDivisor({z: -2}), f"inf is special; K_C = -2[{z}] at a fresh point"


def canonical_divisor(fan, K_C: CurveQDivisor | Mapping | None = None,
                      datum: HorosphericalDatum | None = None) -> CanonicalDivisor:
    fan = as_fan(fan, datum)
    datum = _datum(fan, datum)
    if K_C is None:
        K_C, note = default_canonical_curve_divisor(fan)
    else:
        K_C = K_C if isinstance(K_C, CurveQDivisor) else CurveQDivisor(K_C)
        note = "K_C supplied"
        if not K_C.is_integral():
            raise DivisorError("K_C must be an integral divisor")
        if K_C.degree != 2 * fan.genus - 2:
            raise DivisorError(f"K_C has degree {K_C.degree}, expected {2 * fan.genus - 2}")
    special = set(fan.special_points)
    vert = {v: v.mu * K_C.coefficient(v.point) + v.mu - 1 for v in fan_vertices(fan)}
    ray = {r: -1 for r in fan_rays(fan)}
    color = {}
    for a in datum.color_roots:
        aa = a_alpha(datum, a)
        assert aa >= 2, "a_alpha >= 2 violated"
        color[a] = -aa
    curve = {z: c for z, c in K_C.items() if z not in special and _point_in_C_sigma(fan, z)}
    return CanonicalDivisor(BStableDivisor(vert, ray, color, CurveQDivisor(curve)), K_C, note)


# ---------------------------------------------------------------------------
# Piecewise linear functions and Cartier divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PLPiece:
    """Restriction of ``theta`` to one item: ``theta(z, u, l) = <m_z, u> + l gamma_z``.

    ``local`` holds ``(m_z, gamma_z)`` at the listed points; at every other
    point of ``C_0`` the pair is ``(m, 0)``.
    """

    m: tuple[int, ...]
    local: Mapping[Point, tuple[tuple[int, ...], int]] = field(default_factory=dict)

    def at(self, z: Point) -> tuple[tuple[int, ...], int]:
        return self.local.get(z, (self.m, 0))

    def value(self, z: Point, u: Sequence, l=0) -> Fraction:
        mz, g = self.at(z) if l else (self.m, 0)
        return dot(mz, u) + l * g


@dataclass(frozen=True)
class PLFunction:
    pieces: tuple[PLPiece, ...]
    r: Mapping[str, int] = field(default_factory=dict)


def _dominating_items(fan: DivisorialFan) -> list[int]:
    """For each item, the index of a maximal item whose hypercone contains it.

    Constraints coming from a face item are implied by those of the item it
    sits in, so only maximal items need unknowns.
    """
    pts = fan.relevant_points + (GENERIC,)
    cones = [[fan.hyper_slice(i, z) for z in pts] for i in range(len(fan))]
    size = [sum(c.dim for c in row) for row in cones]
    order = sorted(range(len(fan)), key=lambda i: (-size[i], i))
    maximal: list[int] = []
    owner = [0] * len(fan)
    for j in order:
        Dj = fan.items[j]
        host = next((i for i in maximal
                     if Dj.colors <= fan.items[i].colors
                     and all(a.contains_cone(b) for a, b in zip(cones[i], cones[j]))), None)
        if host is None:
            maximal.append(j)
            host = j
        owner[j] = host
    return owner


class _System:
    """Sparse integer linear system for ``theta`` over the maximal items of a fan."""

    def __init__(self, fan: DivisorialFan, datum: HorosphericalDatum, curve_points: Iterable[Point]):
        self.fan = fan
        self.datum = datum
        self.n = n = fan.rank
        self.special = set(fan.special_points)
        self.points = sorted(set(fan.relevant_points) | set(curve_points))
        self.owner = _dominating_items(fan)
        self.live = sorted(set(self.owner))
        self.index: dict = {}
        size = 0
        for i in self.live:
            D = fan.items[i]
            self.index[i, "m"] = size
            size += n
            for z in self.points:
                if not D.base.contains(z):
                    continue
                if not D.base.is_projective:
                    self.index[i, "m", z] = size
                    size += n
                self.index[i, "g", z] = size
                size += 1
        self.size = size
        self.rows: list[dict[int, Fraction]] = []
        self.targets: list[tuple] = []

    def theta_row(self, i: int, z: Point | None, u: Sequence, l) -> dict[int, Fraction]:
        row: dict[int, Fraction] = {}
        if l and z is not None and z != GENERIC and self.fan.items[i].base.contains(z):
            base = self.index.get((i, "m", z), self.index[i, "m"])
            row[self.index[i, "g", z]] = Fraction(l)
        else:
            base = self.index[i, "m"]
        for k, x in enumerate(u):
            if x:
                row[base + k] = row.get(base + k, 0) + Fraction(x)
        return row

    def add(self, row, target):
        row = {j: a for j, a in row.items() if a}
        if row or target[0] != "zero":
            self.rows.append(row)
            self.targets.append(target)

    def build(self):
        fan, n = self.fan, self.n
        self.colored = {c.alpha: c.image for D in fan.items for c in D.colors}
        for i in self.live:
            D = fan.items[i]
            # level-zero consistency: m_z - m vanishes on sigma
            for z in self.points:
                if (i, "m", z) in self.index:
                    for r in D.tail.rays:
                        row = {}
                        for k in range(n):
                            if r[k]:
                                row[self.index[i, "m", z] + k] = Fraction(r[k])
                                row[self.index[i, "m"] + k] = Fraction(-r[k])
                        self.add(row, ("zero",))
            if D.base.is_projective:
                self.add({self.index[i, "g", z]: Fraction(1) for z in self.points}, ("zero",))
            for z in self.points:
                if not D.base.contains(z):
                    continue
                if z in self.special:
                    for v in D.coefficient(z).vertices:
                        vert = Vertex(z, v)
                        u = tuple(vert.mu * x for x in v)
                        self.add(self.theta_row(i, z, u, vert.mu), ("vert", vert))
                elif _point_in_C_sigma(fan, z):
                    self.add(self.theta_row(i, z, (0,) * n, 1), ("curve", z))
            for r in divisor_rays(D):
                self.add(self.theta_row(i, None, r, 0), ("ray", r))
            for c in D.colors:
                self.add(self.theta_row(i, None, c.image, 0), ("color", c.alpha))
        for z in self.points + [GENERIC]:
            zi = z if z != GENERIC else None
            for i, j in itertools.combinations(self.live, 2):
                k = fan.hyper_slice(i, z).intersect(fan.hyper_slice(j, z))
                for g in k.generators:
                    u, l = g[:-1], g[-1]
                    row = self.theta_row(i, zi, u, l)
                    for col, a in self.theta_row(j, zi, u, l).items():
                        row[col] = row.get(col, 0) - a
                    self.add(row, ("zero",))

    def rhs(self, D: BStableDivisor) -> list[Fraction]:
        out = []
        for t in self.targets:
            kind = t[0]
            if kind == "zero":
                out.append(Fraction(0))
            elif kind == "vert":
                out.append(Fraction(D.vert.get(t[1], 0)))
            elif kind == "curve":
                out.append(Fraction(D.curve.coefficient(t[1])))
            elif kind == "ray":
                out.append(Fraction(D.ray.get(t[1], 0)))
            elif kind == "color":
                out.append(Fraction(D.color.get(t[1], 0)))
        return out

    def integer_rows(self) -> list[dict[int, int]]:
        out = []
        for row in self.rows:
            if any(a.denominator != 1 for a in row.values()):
                raise ArithmeticError("non-integral coefficient in the Cartier system")
            out.append({j: int(a) for j, a in row.items()})
        return out

    def to_theta(self, x: Sequence[int], D: BStableDivisor) -> PLFunction:
        live = {}
        for i in self.live:
            m = tuple(x[self.index[i, "m"] + k] for k in range(self.n))
            local = {}
            for z in self.points:
                if (i, "g", z) not in self.index:
                    continue
                mz = m
                if (i, "m", z) in self.index:
                    mz = tuple(x[self.index[i, "m", z] + k] for k in range(self.n))
                g = x[self.index[i, "g", z]]
                if mz != m or g:
                    local[z] = (mz, g)
            live[i] = PLPiece(m, local)
        pieces = []
        for j, D_j in enumerate(self.fan.items):
            host = live[self.owner[j]]
            pieces.append(PLPiece(host.m, {z: v for z, v in host.local.items() if D_j.base.contains(z)}))
        free = {a: int(D.color.get(a, 0)) for a in self.datum.color_roots if a not in self.colored}
        return PLFunction(tuple(pieces), free)


def _system_for(fan: DivisorialFan, datum: HorosphericalDatum, D: BStableDivisor) -> _System:
    extra_v = set(D.vert) - set(fan_vertices(fan))
    if extra_v:
        raise DivisorError(f"divisor uses vertices outside Vert: {sorted(map(repr, extra_v))}")
    extra_r = set(D.ray) - set(fan_rays(fan))
    if extra_r:
        raise DivisorError(f"divisor uses rays outside Ray: {sorted(extra_r)}")
    special = set(fan.special_points)
    sys = _System(fan, datum, [z for z in D.curve if z not in special])
    sys.build()
    return sys


def pl_to_divisor(fan: DivisorialFan, theta: PLFunction, datum: HorosphericalDatum | None = None) -> BStableDivisor:
    """``D_theta``: evaluate ``theta`` on the primitive generators of the B-stable divisors."""
    datum = _datum(fan, datum)
    special = set(fan.special_points)
    vert = {}
    for v in fan_vertices(fan):
        i = next(k for k, D in enumerate(fan.items) if D.base.contains(v.point) and v.v in D.coefficient(v.point).vertices)
        vert[v] = theta.pieces[i].value(v.point, tuple(v.mu * x for x in v.v), v.mu)
    ray = {}
    for r in fan_rays(fan):
        i = next(k for k, D in enumerate(fan.items) if r in divisor_rays(D))
        ray[r] = theta.pieces[i].value(None, r, 0)
    color = dict(theta.r)
    for i, D in enumerate(fan.items):
        for c in D.colors:
            color.setdefault(c.alpha, theta.pieces[i].value(None, c.image, 0))
    curve = {}
    for i, (D, piece) in enumerate(zip(fan.items, theta.pieces)):
        for z, (_, g) in piece.local.items():
            if z not in special and g and _point_in_C_sigma(fan, z):
                curve[z] = g
    return BStableDivisor(vert, ray, color, CurveQDivisor(curve))


@dataclass(frozen=True)
class CartierResult:
    cartier: bool
    theta: PLFunction | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.cartier


def is_cartier(fan, D: BStableDivisor, datum: HorosphericalDatum | None = None) -> CartierResult:
    fan = as_fan(fan, datum)
    datum = _datum(fan, datum)
    if not D.is_integral():
        raise DivisorError("Cartier test needs an integral divisor")
    sys = _system_for(fan, datum, D)
    best = min_integral_multiple_sparse(sys.integer_rows(), sys.rhs(D), sys.size)
    if best is None:
        return CartierResult(False, None, "no rational piecewise linear function matches the coefficients")
    d, x = best
    if d != 1:
        return CartierResult(False, None, f"the matching piecewise linear function is not integral ({d} D is Cartier)")
    return CartierResult(True, sys.to_theta(x, D), "")


@dataclass(frozen=True)
class GorensteinResult:
    index: int
    theta: PLFunction
    canonical: CanonicalDivisor
    notes: tuple[str, ...] = ()


def is_q_gorenstein(fan, K_C=None, datum: HorosphericalDatum | None = None) -> GorensteinResult | None:
    """Smallest ``d`` with ``d K_X`` Cartier, with the function ``theta``, or ``None``."""
    fan = as_fan(fan, datum)
    datum = _datum(fan, datum)
    K = canonical_divisor(fan, K_C, datum)
    sys = _system_for(fan, datum, K.divisor)
    best = min_integral_multiple_sparse(sys.integer_rows(), sys.rhs(K.divisor), sys.size)
    if best is None:
        return None
    d, x = best
    dK = K.divisor.scale(d)
    notes = (K.note, "vertex coefficients use mu(<m_z, v> + gamma_z)")
    return GorensteinResult(d, sys.to_theta(x, dK), K, notes)


# ---------------------------------------------------------------------------
# Rational singularities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalityResult:
    rational: bool
    reason: str
    witness: tuple[int, ...] | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.rational


def _floor_degree(D: ColoredPolyhedralDivisor, m: Sequence[int]) -> int:
    return int(evaluate(D, m).floor().degree)


def _pointed_pieces(c: Cone) -> list[Cone]:
    if c.is_pointed():
        return [c]
    d = c.ambient_rank
    out = []
    for signs in itertools.product((1, -1), repeat=d):
        orth = Cone.from_generators([tuple(s if i == j else 0 for j in range(d)) for i, s in enumerate(signs)], d)
        piece = c.intersect(orth)
        if piece.dim == d:
            out.append(piece)
    return out


def has_rational_singularities(D: ColoredPolyhedralDivisor) -> RationalityResult:
    """Rational singularities test for a simple model.

    On the projective line, ``m -> deg floor D(m)`` is evaluated on a finite
    set: on each chamber of the common refinement of the normal quasi-fans the
    vertices ``v_z`` realizing the minima are fixed, and adding ``mu_i g_i`` to
    ``m`` (``g_i`` a generator of a simplicial piece, ``mu_i`` clearing the
    denominators of ``<g_i, v_z>``) changes the value by ``mu_i * h(g_i) >= 0``.
    So lattice points ``p + sum r_i g_i`` with ``p`` in the half-open
    parallelepiped and ``0 <= r_i < mu_i`` suffice.
    """
    cert = is_proper(D)
    if not cert:
        raise DivisorError(f"improper divisor: {cert.reason}")
    if D.base.is_affine:
        return RationalityResult(True, "C_0 is affine")
    if D.base.genus != 0:
        return RationalityResult(False, "C_0 is a projective curve of positive genus")
    n = D.rank
    dual = D.tail.dual()
    fans = [normal_quasifan(P) for P in D.coeffs.values()]
    chambers = [(dual, ())]
    for qf in fans:
        nxt = []
        for c, labels in chambers:
            for cone, w in zip(qf.cones, qf.labels):
                k = c.intersect(cone)
                if k.dim == n:
                    nxt.append((k, labels + (w,)))
        chambers = nxt
    checked = 0
    worst = None
    for chamber, vs in chambers:
        for piece in _pointed_pieces(chamber):
            for simplex in pulling_triangulation(piece):
                gens = list(simplex)
                mus = [lcm_denominators(dot(g, v) for v in vs) if vs else 1 for g in gens]
                base = [(0,) * n] + [p for p, _ in _box_points(gens)]
                for p in base:
                    for r in itertools.product(*[range(mu) for mu in mus]):
                        m = tuple(p[t] + sum(ri * g[t] for ri, g in zip(r, gens)) for t in range(n))
                        checked += 1
                        val = _floor_degree(D, m)
                        if val < -1:
                            return RationalityResult(False, f"deg floor D(m) = {val} < -1", m, checked)
                        if worst is None or val < worst[0]:
                            worst = (val, m)
    return RationalityResult(True, "deg floor D(m) >= -1 on the whole weight cone", None, checked)


def rational_singularities_bruteforce(D: ColoredPolyhedralDivisor, bound: int = 50) -> bool:
    """Reference check enumerating ``m`` with all coordinates in ``[-bound, bound]``."""
    if D.base.is_affine:
        return True
    if D.base.genus != 0:
        return False
    dual_gens = D.tail.facet_normals
    n = D.rank
    for m in itertools.product(range(-bound, bound + 1), repeat=n):
        if all(dot(m, r) >= 0 for r in D.tail.rays) and _floor_degree(D, m) < -1:
            return False
    return True


# ---------------------------------------------------------------------------
# Smoothness
# ---------------------------------------------------------------------------

def check_colored_cone_smooth(datum: HorosphericalDatum, cone: Cone, colors: Iterable[Color]) -> bool:
    """Smoothness of the simple embedding attached to a colored cone.

    ``colors`` carry their images in the ambient space of ``cone``.
    """
    colors = list(colors)
    if not cone.is_strongly_convex():
        raise ValueError("colored cone must be strongly convex")
    for c in colors:
        if len(c.image) != cone.ambient_rank or not any(c.image) or not cone.contains(c.image):
            raise ValueError(f"color {c.alpha} does not define a colored cone with {cone}")
    images = [tuple(c.image) for c in colors]
    if len(set(images)) != len(images):
        return False
    if not cone.is_regular():
        return False
    if any(img not in cone.rays for img in images):
        return False
    I = set(datum.I)
    IF = {c.alpha for c in colors}
    lhs = weyl_order(datum, I)
    for a in sorted(IF):
        lhs *= a_alpha(datum, a)
    return lhs == weyl_order(datum, I | IF)


def _embedded(colors: Iterable[Color]) -> list[Color]:
    return [Color(c.alpha, embed_color(c)) for c in colors]


@dataclass(frozen=True)
class SmoothnessResult:
    verdict: Verdict
    reason: str = ""
    item: int | None = None
    point: Point | None = None

    @property
    def smooth(self) -> Verdict:
        return self.verdict


def two_point_normal_form(D: ColoredPolyhedralDivisor):
    """Move integral translations so at most two points carry nontrivial data.

    Returns ``(Delta_0, Delta_inf)`` or ``None`` if more than two coefficients
    are not lattice translates of the tail cone.
    """
    n = D.rank
    essential, shift = [], [Fraction(0)] * n
    for z, P in D.coeffs.items():
        if len(P.vertices) == 1 and all(x.denominator == 1 for x in P.vertices[0]):
            shift = [a + b for a, b in zip(shift, P.vertices[0])]
        else:
            essential.append(P)
    if len(essential) > 2:
        return None
    from .polyhedra import Polyhedron

    while len(essential) < 2:
        essential.append(Polyhedron.trivial(D.tail))
    return essential[0].translate(shift), essential[1]


def _item_smoothness(fan: DivisorialFan, datum: HorosphericalDatum, i: int) -> SmoothnessResult:
    D = fan.items[i]
    cols = _embedded(D.sorted_colors())
    if D.base.is_affine:
        for z in D.special_points + (GENERIC,):
            s = fan.slice(i, z)
            if not check_colored_cone_smooth(datum, s, [c for c in cols if s.contains(c.image)]):
                return SmoothnessResult(Verdict.FALSE, "colored slice cone is not smooth", i, z)
        return SmoothnessResult(Verdict.TRUE, "", i)
    if D.base.genus != 0:
        return SmoothnessResult(Verdict.FALSE, "projective base of positive genus", i)
    nf = two_point_normal_form(D)
    if nf is None:
        return SmoothnessResult(Verdict.UNDECIDED, "no two-point normal form by integral translation", i)
    P0, Pinf = nf
    n = D.rank
    gens = [r + (0,) for r in D.tail.rays]
    gens += [primitive(tuple(v) + (1,)) for v in P0.vertices]
    gens += [primitive(tuple(v) + (-1,)) for v in Pinf.vertices]
    c = Cone.from_generators(gens, n + 1)
    if not c.is_strongly_convex():
        return SmoothnessResult(Verdict.FALSE, "two-point cone contains a line", i)
    if not check_colored_cone_smooth(datum, c, cols):
        return SmoothnessResult(Verdict.FALSE, "two-point colored cone is not smooth", i)
    return SmoothnessResult(Verdict.TRUE, "", i)


def is_smooth(fan, datum: HorosphericalDatum | None = None) -> SmoothnessResult:
    fan = as_fan(fan, datum)
    datum = _datum(fan, datum)
    undecided = None
    for i in range(len(fan)):
        res = _item_smoothness(fan, datum, i)
        if res.verdict is Verdict.FALSE:
            return res
        if res.verdict is Verdict.UNDECIDED and undecided is None:
            undecided = res
    return undecided or SmoothnessResult(Verdict.TRUE, "every colored cone passes the smoothness test")


# ---------------------------------------------------------------------------
# Log-terminal singularities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogTerminalResult:
    log_terminal: bool
    reason: str
    mu_sum: Fraction | None = None

    def __bool__(self) -> bool:
        return self.log_terminal


def is_log_terminal(D, datum: HorosphericalDatum | None = None, K_C=None) -> LogTerminalResult:
    fan = as_fan(D, datum)
    if len(fan) != 1:
        raise FanError("the log-terminal criterion applies to a single simple model")
    (D,) = fan.items
    if is_q_gorenstein(fan, K_C, datum) is None:
        raise DivisorError("the model is not Q-Gorenstein")
    if D.base.is_affine:
        return LogTerminalResult(True, "C_0 is affine")
    if D.base.genus != 0:
        return LogTerminalResult(False, "C_0 is projective of positive genus")
    total = Fraction(0)
    for P in D.coeffs.values():
        mu = max(lcm_denominators(v) for v in P.vertices)
        total += 1 - Fraction(1, mu)
    return LogTerminalResult(total < 2, f"sum of (1 - 1/mu_z) = {total}", total)


def discrepancies(fan, datum: HorosphericalDatum | None = None,
                  resolution: Resolution | None = None) -> list[tuple[str, Fraction]]:
    """Coefficients of ``K_Y - phi^* K_X`` on the exceptional divisors of the resolution."""
    fan = as_fan(fan, datum)
    datum = _datum(fan, datum)
    gor = is_q_gorenstein(fan, None, datum)
    if gor is None:
        raise DivisorError("discrepancies need a Q-Gorenstein model")
    res = resolution or resolve(fan)
    d = gor.index
    K_C = gor.canonical.K_C
    out = []

    def theta_at(z, u, l):
        for i in range(len(fan)):
            if fan.hyper_slice(i, z if l else GENERIC).contains(tuple(u) + (l,)):
                return gor.theta.pieces[i].value(z, u, l)
        raise FanError(f"{(z, tuple(u), l)} is outside the support of the fan")

    for v in res.exceptional_vertices:
        u = tuple(v.mu * x for x in v.v)
        pull = Fraction(theta_at(v.point, u, v.mu), d)
        kv = v.mu * K_C.coefficient(v.point) + v.mu - 1
        out.append((v.label(), kv - pull))
    for r in res.exceptional_rays:
        pull = Fraction(theta_at(None, r, 0), d)
        out.append((ray_label(r), -1 - pull))
    return out

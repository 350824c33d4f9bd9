"""Exact rational cones and polyhedra.

Cones are stored by canonical generators (a lattice basis of the lineality
space followed by the extremal rays of the pointed part) together with an
H-representation (facet normals and equations).  All computations go through
one primitive, :func:`_hrep`, which enumerates candidate facet normals from
subsets of the generators; this is the right trade-off at the small ranks
(at most 4 or so) the package targets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, total_ordering
from typing import Iterable, Sequence

from .lattice import (
    hermite_normal_form,
    integer_kernel,
    primitive,
    rational_rank,
    rational_nullspace,
    smith_normal_form,
    solve_rational,
    IntMatrix,
)

Vector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


@total_ordering
class _NegInf:
    """The value ``-inf`` of a support function; compares below every number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("-inf")

    def __repr__(self):
        return "NEG_INF"

    def __str__(self):
        return "-inf"


NEG_INF = _NegInf()


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _hrep(gens: Sequence[Vector], d: int) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Facet normals and equations of ``cone(gens)`` in ``Q^d``."""
    gens = [g for g in gens if any(g)]
    if not gens:
        eqs = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
        return (), eqs
    eqs = integer_kernel(gens)
    eqs = tuple(_hnf_basis(eqs, d))
    k = d - len(eqs)
    normals: set[Vector] = set()
    for subset in itertools.combinations(range(len(gens)), k - 1):
        rows = [gens[i] for i in subset]
        if rows and rational_rank(rows) != k - 1:
            continue
        null = rational_nullspace(list(eqs) + rows, d)
        if len(null) != 1:
            continue
        n = primitive(null[0])
        vals = [dot(n, g) for g in gens]
        if all(v >= 0 for v in vals) and any(v > 0 for v in vals):
            normals.add(n)
        elif all(v <= 0 for v in vals) and any(v < 0 for v in vals):
            normals.add(tuple(-x for x in n))
    return tuple(sorted(normals)), eqs


def _hnf_basis(vectors: Sequence[Vector], d: int) -> list[Vector]:
    """Canonical basis (nonzero HNF rows) of the lattice spanned by ``vectors``."""
    vectors = [tuple(v) for v in vectors if any(v)]
    if not vectors:
        return []
    H, _ = hermite_normal_form(IntMatrix.from_rows(vectors, d))
    return [H.row(i) for i in range(H.rows) if any(H.row(i))]


class Cone:
    """A rational polyhedral cone in ``Q^ambient_rank``.

    Construct with :meth:`from_generators` or :meth:`from_hrep`.  Two cones
    compare equal iff they are the same subset of ``Q^d``.
    """

    __slots__ = ("ambient_rank", "rays", "lineality", "facet_normals", "equations", "__dict__")

    def __init__(self, ambient_rank: int, rays, lineality, facet_normals, equations):
        self.ambient_rank = ambient_rank
        self.rays: tuple[Vector, ...] = rays
        self.lineality: tuple[Vector, ...] = lineality
        self.facet_normals: tuple[Vector, ...] = facet_normals
        self.equations: tuple[Vector, ...] = equations

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence], ambient_rank: int | None = None) -> "Cone":
        gens = [primitive(g) for g in gens]
        if ambient_rank is None:
            if not gens:
                raise ValueError("ambient rank required for a cone without generators")
            ambient_rank = len(gens[0])
        d = ambient_rank
        if any(len(g) != d for g in gens):
            raise ValueError("generator of wrong length")
        return _canonical_cone(d, tuple(sorted({g for g in gens if any(g)})))

    @classmethod
    def _build(cls, d: int, gens: tuple[Vector, ...]) -> "Cone":
        gens = list(gens)
        ineqs, eqs = _hrep(gens, d)
        lin_rows = [list(n) for n in ineqs] + [list(e) for e in eqs]
        lin_basis = integer_kernel(lin_rows) if lin_rows else [
            tuple(int(i == j) for j in range(d)) for i in range(d)
        ]
        lineality = tuple(_hnf_basis(lin_basis, d))
        if lineality:
            # pointed part lives in the orthogonal complement of the lineality space
            gens = sorted({primitive(_project_out(g, lineality)) for g in gens})
            gens = [g for g in gens if any(g)]
        rays = []
        for g in gens:
            tight = [n for n in ineqs if dot(n, g) == 0]
            if rational_rank(tight + list(eqs) + list(lineality)) == d - 1:
                rays.append(g)
        return cls(d, tuple(sorted(set(rays))), lineality, ineqs, eqs)

    @classmethod
    def from_hrep(cls, ineqs: Iterable[Sequence], eqs: Iterable[Sequence] = (), ambient_rank: int | None = None) -> "Cone":
        """The cone ``{x : <n,x> >= 0 for n in ineqs, <e,x> = 0 for e in eqs}``."""
        ineqs = [tuple(n) for n in ineqs]
        eqs = [tuple(e) for e in eqs]
        if ambient_rank is None:
            sample = ineqs + eqs
            if not sample:
                raise ValueError("ambient rank required for an empty system")
            ambient_rank = len(sample[0])
        gens = ineqs + eqs + [tuple(-x for x in e) for e in eqs]
        return cls.from_generators(gens, ambient_rank).dual()

    @classmethod
    def zero(cls, d: int) -> "Cone":
        return cls.from_generators([], d)

    @classmethod
    def orthant(cls, d: int) -> "Cone":
        return cls.from_generators([tuple(int(i == j) for j in range(d)) for i in range(d)], d)

    @classmethod
    def whole(cls, d: int) -> "Cone":
        basis = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        return cls.from_generators(basis + [tuple(-x for x in b) for b in basis], d)

    # -- basic structure ------------------------------------------------

    @property
    def ray_generators(self) -> tuple[Vector, ...]:
        return self.rays

    @cached_property
    def generators(self) -> tuple[Vector, ...]:
        lin = []
        for b in self.lineality:
            lin.extend((b, tuple(-x for x in b)))
        return tuple(lin) + self.rays

    @property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equations)

    def is_strongly_convex(self) -> bool:
        return not self.lineality

    is_pointed = is_strongly_convex

    def is_simplicial(self) -> bool:
        return self.is_pointed() and len(self.rays) == self.dim

    def contains(self, v: Sequence) -> bool:
        return all(dot(n, v) >= 0 for n in self.facet_normals) and all(dot(e, v) == 0 for e in self.equations)

    __contains__ = contains

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def relative_interior_point(self) -> Vector:
        d = self.ambient_rank
        return tuple(sum(g[i] for g in self.generators) for i in range(d))

    def in_relative_interior(self, v: Sequence) -> bool:
        return self.contains(v) and all(dot(n, v) > 0 for n in self.facet_normals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        return (self.ambient_rank, self.rays, self.lineality) == (other.ambient_rank, other.rays, other.lineality)

    def __hash__(self) -> int:
        return hash((self.ambient_rank, self.rays, self.lineality))

    def sort_key(self):
        return (self.dim, self.lineality, self.rays)

    def __repr__(self) -> str:
        if self.lineality:
            return f"Cone(rays={list(self.rays)}, lineality={list(self.lineality)})"
        return f"Cone({list(self.rays)})" if self.rays else f"Cone.zero({self.ambient_rank})"

    # -- operations -----------------------------------------------------

    def dual(self) -> "Cone":
        return self._dual

    @cached_property
    def _dual(self) -> "Cone":
        gens = list(self.facet_normals) + list(self.equations) + [tuple(-x for x in e) for e in self.equations]
        return Cone.from_generators(gens, self.ambient_rank)

    def intersect(self, other: "Cone") -> "Cone":
        if self.ambient_rank != other.ambient_rank:
            raise ValueError("cones live in different ambient spaces")
        return _intersect(self, other)

    def _intersect_uncached(self, other: "Cone") -> "Cone":
        return Cone.from_hrep(
            self.facet_normals + other.facet_normals,
            self.equations + other.equations,
            self.ambient_rank,
        )

    def face_containing(self, v: Sequence) -> "Cone":
        """Smallest face of ``self`` containing the point ``v`` of ``self``."""
        if not self.contains(v):
            raise ValueError(f"{v} is not in {self}")
        tight = [n for n in self.facet_normals if dot(n, v) == 0]
        return Cone.from_generators([g for g in self.generators if all(dot(n, g) == 0 for n in tight)],
                                    self.ambient_rank)

    def is_face_of(self, other: "Cone") -> bool:
        if self.ambient_rank != other.ambient_rank or not other.contains_cone(self):
            return False
        return other.face_containing(self.relative_interior_point()) == self

    def faces(self) -> list["Cone"]:
        """All faces, from ``{0}`` (or the lineality space) up to ``self``."""
        if not self.is_pointed():
            raise ValueError("face lattice requested for a cone containing a line")
        seen = {self}
        frontier = [self]
        while frontier:
            nxt = []
            for f in frontier:
                for n in self.facet_normals:
                    if all(dot(n, r) == 0 for r in f.rays):
                        continue
                    sub = Cone.from_generators([r for r in f.rays if dot(n, r) == 0], self.ambient_rank)
                    if sub not in seen and sub.dim == f.dim - 1:
                        seen.add(sub)
                        nxt.append(sub)
            frontier = nxt
        return sorted(seen, key=Cone.sort_key)

    def facets(self) -> list["Cone"]:
        return [f for f in self.faces() if f.dim == self.dim - 1]

    def is_regular(self) -> bool:
        """True iff the primitive rays are part of a lattice basis."""
        if not self.is_simplicial():
            return False
        if not self.rays:
            return True
        return self.multiplicity() == 1

    def multiplicity(self) -> int:
        """Index of the ray lattice in the saturated lattice of the span (simplicial cones)."""
        if not self.is_simplicial():
            raise ValueError("multiplicity is defined for simplicial cones")
        if not self.rays:
            return 1
        _, S, _ = smith_normal_form(IntMatrix.from_rows(self.rays))
        out = 1
        for d in S.diagonal():
            out *= d
        return out


# cones are immutable, so construction and intersection results are shared
@lru_cache(maxsize=1 << 16)
def _canonical_cone(d: int, gens: tuple[Vector, ...]) -> Cone:
    return Cone._build(d, gens)


@lru_cache(maxsize=1 << 16)
def _intersect(a: Cone, b: Cone) -> Cone:
    return a._intersect_uncached(b)


def _project_out(v: Sequence, basis: Sequence[Vector]) -> tuple[Fraction, ...]:
    """Orthogonal projection of ``v`` onto the complement of ``span(basis)``."""
    if not basis:
        return tuple(Fraction(x) for x in v)
    gram = [[dot(a, b) for b in basis] for a in basis]
    rhs = [dot(a, v) for a in basis]
    coeffs = solve_rational(gram, rhs).witness
    return tuple(Fraction(v[i]) - sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(len(v)))


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def is_strongly_convex(c: Cone) -> bool:
    return c.is_strongly_convex()


def faces(c: Cone) -> list[Cone]:
    return c.faces()


def intersect_cones(c1: Cone, c2: Cone) -> Cone:
    return c1.intersect(c2)


def is_regular_cone(c: Cone) -> bool:
    return c.is_regular()


# ---------------------------------------------------------------------------
# Polyhedra
# ---------------------------------------------------------------------------

def _as_rat(v: Sequence) -> RatVector:
    return tuple(Fraction(x) for x in v)


class Polyhedron:
    """``conv(vertices) + tail`` with a strongly convex tail cone."""

    __slots__ = ("vertices", "tail", "__dict__")

    def __init__(self, points: Iterable[Sequence], tail: Cone):
        if not tail.is_pointed():
            raise ValueError("polyhedron tail must be strongly convex")
        points = [_as_rat(p) for p in points]
        if not points:
            raise ValueError("a polyhedron needs at least one point")
        d = tail.ambient_rank
        if any(len(p) != d for p in points):
            raise ValueError("point of wrong dimension")
        hom = [_homogenize(p) for p in points] + [tuple(r) + (0,) for r in tail.rays]
        h = Cone.from_generators(hom, d + 1)
        verts = sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in h.rays if r[-1] > 0)
        self.vertices: tuple[RatVector, ...] = tuple(verts)
        self.tail = tail

    @classmethod
    def point(cls, p: Sequence, tail: Cone) -> "Polyhedron":
        return cls([p], tail)

    @classmethod
    def trivial(cls, tail: Cone) -> "Polyhedron":
        """The polyhedron ``tail`` itself (vertex 0)."""
        return cls([(0,) * tail.ambient_rank], tail)

    @property
    def ambient_rank(self) -> int:
        return self.tail.ambient_rank

    @cached_property
    def homogenized(self) -> Cone:
        """``cone(tail x 0, P x 1)`` in ``Q^(d+1)``."""
        d = self.ambient_rank
        return Cone.from_generators(
            [_homogenize(v) for v in self.vertices] + [tuple(r) + (0,) for r in self.tail.rays], d + 1
        )

    def is_trivial(self) -> bool:
        return self.vertices == ((Fraction(0),) * self.ambient_rank,)

    def contains(self, p: Sequence) -> bool:
        return self.homogenized.contains(_homogenize(_as_rat(p)))

    def support_value(self, w: Sequence):
        if any(dot(w, r) < 0 for r in self.tail.rays):
            return NEG_INF
        return min(dot(w, v) for v in self.vertices)

    def face(self, w: Sequence) -> "Polyhedron":
        val = self.support_value(w)
        if val is NEG_INF:
            raise ValueError(f"{tuple(w)} is unbounded below on the polyhedron")
        tail = Cone.from_generators([r for r in self.tail.rays if dot(w, r) == 0], self.ambient_rank)
        return Polyhedron([v for v in self.vertices if dot(w, v) == val], tail)

    def __add__(self, other: "Polyhedron") -> "Polyhedron":
        if self.tail != other.tail:
            raise ValueError("Minkowski sum of polyhedra with different tails")
        pts = [tuple(a + b for a, b in zip(v, u)) for v in self.vertices for u in other.vertices]
        return Polyhedron(pts, self.tail)

    def translate(self, t: Sequence) -> "Polyhedron":
        return Polyhedron([tuple(a + Fraction(b) for a, b in zip(v, t)) for v in self.vertices], self.tail)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.vertices == other.vertices and self.tail == other.tail

    def __hash__(self) -> int:
        return hash((self.vertices, self.tail))

    def __repr__(self) -> str:
        vs = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"Polyhedron([{vs}] + {self.tail!r})"


def _homogenize(p: Sequence) -> Vector:
    p = _as_rat(p)
    return primitive(p + (Fraction(1),))


def support_value(P: Polyhedron, w: Sequence):
    return P.support_value(w)


def face_of(P: Polyhedron, w: Sequence) -> Polyhedron:
    return P.face(w)


def minkowski_sum(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    return P + Q


@dataclass(frozen=True)
class QuasiFan:
    """Maximal cones of a quasi-fan, each labelled by the vertex it comes from."""

    cones: tuple[Cone, ...]
    labels: tuple[RatVector, ...] = ()

    def __len__(self) -> int:
        return len(self.cones)


def normal_quasifan(P: Polyhedron) -> QuasiFan:
    """The cones ``{m : <m,w> = min_P <m,.>}`` over the vertices ``w`` of ``P``."""
    d = P.ambient_rank
    cones, labels = [], []
    for w in P.vertices:
        ineqs = [primitive(tuple(a - b for a, b in zip(u, w))) for u in P.vertices if u != w]
        ineqs += list(P.tail.rays)
        c = Cone.from_hrep(ineqs, (), d) if ineqs else Cone.whole(d)
        cones.append(c)
        labels.append(w)
    return QuasiFan(tuple(cones), tuple(labels))


# ---------------------------------------------------------------------------
# Subdivision into regular cones
# ---------------------------------------------------------------------------

def _ray_order_key(r: Vector):
    # rays above level 0 come first when the last coordinate is a height
    return (-(r[-1] > 0), tuple(-abs(x) for x in r[::-1]), r)


def pulling_triangulation(c: Cone, order=None) -> list[tuple[Vector, ...]]:
    """Simplicial subdivision of a pointed cone using only its own rays.

    ``order`` is a sort key on rays; using one global key makes the
    triangulations of shared faces agree.
    """
    key = order or (lambda r: r)
    if c.is_simplicial():
        return [tuple(sorted(c.rays))]
    apex = min(c.rays, key=key)
    out = []
    for facet in c.facets():
        if apex in facet.rays:
            continue
        for simplex in pulling_triangulation(facet, key):
            out.append(tuple(sorted(simplex + (apex,))))
    return out


def _box_points(rays: Sequence[Vector]) -> list[Vector]:
    """Nonzero lattice points ``sum l_i r_i`` with ``0 <= l_i < 1``."""
    d = len(rays[0])
    k = len(rays)
    eqs = integer_kernel(rays)
    basis = integer_kernel(eqs) if eqs else [tuple(int(i == j) for j in range(d)) for i in range(d)]
    # coordinates of each ray in that basis
    Bt = [[b[i] for b in basis] for i in range(d)]
    A = []
    for r in rays:
        sol = solve_rational(Bt, list(r), ncols=len(basis))
        A.append([int(x) for x in sol.witness])
    U, S, V = smith_normal_form(IntMatrix.from_rows(A, k))
    Vinv = _inverse_unimodular(V)
    Ainv_rows = _rational_inverse(A)
    diag = S.diagonal()
    out = []
    for y in itertools.product(*[range(s) for s in diag]):
        if not any(y):
            continue
        x = [sum(y[i] * Vinv[i][j] for i in range(k)) for j in range(k)]
        lam = [sum(x[i] * Ainv_rows[i][j] for i in range(k)) for j in range(k)]
        lam = [l - (l.numerator // l.denominator) for l in lam]
        p = tuple(sum(lam[i] * rays[i][t] for i in range(k)) for t in range(d))
        out.append((sum(lam), tuple(int(v) for v in p), tuple(lam)))
    out.sort(key=lambda item: (item[0], item[1]))
    return [(p, lam) for _, p, lam in out]


def _rational_inverse(A: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    k = len(A)
    cols = []
    for j in range(k):
        e = [int(i == j) for i in range(k)]
        cols.append(solve_rational([list(r) for r in A], e).witness)
    return [[cols[j][i] for j in range(k)] for i in range(k)]


def _inverse_unimodular(V: IntMatrix) -> list[list[int]]:
    inv = _rational_inverse(V.tolist())
    return [[int(x) for x in row] for row in inv]


def regularize_fan(cones: Sequence[Cone], order=None) -> list[Cone]:
    """Refine a fan of pointed cones into regular cones.

    The cones are first triangulated by pulling with a global ray order, then
    stellar subdivisions are applied at the box point of smallest coefficient
    sum of the non-regular cone of least multiplicity (ties broken
    lexicographically).  Every stellar point lies in the Hilbert basis of the
    cone it subdivides.
    """
    key = order or _ray_order_key
    simplices: set[tuple[Vector, ...]] = set()
    for c in cones:
        if not c.is_pointed():
            raise ValueError("cannot regularize a cone containing a line")
        for s in pulling_triangulation(c, key):
            simplices.add(s)
    simplices = _maximal_only(simplices)
    return [Cone.from_generators(s, cones[0].ambient_rank) if s else Cone.zero(cones[0].ambient_rank)
            for s in sorted(stellar_regularize(simplices))]


def _maximal_only(simplices: Iterable[tuple[Vector, ...]]) -> set[tuple[Vector, ...]]:
    simplices = set(simplices)
    return {s for s in simplices if not any(set(s) < set(t) for t in simplices)}


def _simplex_multiplicity(s: tuple[Vector, ...]) -> int:
    if not s:
        return 1
    _, S, _ = smith_normal_form(IntMatrix.from_rows(s))
    m = 1
    for d in S.diagonal():
        m *= d
    return m


def stellar_step(simplices: set[tuple[Vector, ...]]) -> tuple[Vector, tuple[Vector, ...]] | None:
    """The next stellar point and the face it lies in, or ``None`` if all regular."""
    bad = [(m, s) for s in simplices if (m := _simplex_multiplicity(s)) > 1]
    if not bad:
        return None
    _, s = min(bad)
    p, lam = _box_points(list(s))[0]
    support = tuple(sorted(r for r, l in zip(s, lam) if l))
    return p, support


def stellar_subdivide(simplices: set[tuple[Vector, ...]], p: Vector, support: tuple[Vector, ...]) -> set[tuple[Vector, ...]]:
    out = set()
    sup = set(support)
    for s in simplices:
        if sup <= set(s):
            for r in support:
                out.add(tuple(sorted([x for x in s if x != r] + [p])))
        else:
            out.add(s)
    return out


def stellar_regularize(simplices: set[tuple[Vector, ...]]) -> set[tuple[Vector, ...]]:
    simplices = set(simplices)
    while True:
        step = stellar_step(simplices)
        if step is None:
            return simplices
        simplices = stellar_subdivide(simplices, *step)


def regularize(c: Cone) -> list[Cone]:
    """Subdivide a strongly convex cone into regular cones; keeps all rays of ``c``."""
    if c.is_regular():
        return [c]
    return regularize_fan([c])

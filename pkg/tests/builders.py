"""Shared constructions and independent oracles for the test suite."""

import itertools
import math
import random
from fractions import Fraction

from horosphere.fan import DivisorialFan
from horosphere.pdiv import ColoredPolyhedralDivisor, CurveWithOpen, interval, is_proper
from horosphere.polyhedra import Cone, Polyhedron
from horosphere.rootdata import HorosphericalDatum, RootDatum

RAY = Cone.from_generators([(1,)], 1)
P1 = CurveWithOpen.projective_line()
A1 = CurveWithOpen.projective_line(["inf"])

SL3 = HorosphericalDatum(RootDatum((("A", 2),)), ((1, 0),), {"alpha2"})
SL2 = HorosphericalDatum(RootDatum((("A", 1),)), ((1,),))
TORUS = {
    1: HorosphericalDatum(RootDatum((), 1), ((1,),)),
    2: HorosphericalDatum(RootDatum((), 2), ((1, 0), (0, 1))),
}

RANK2_TAILS = (
    [(1, 0), (0, 1)],
    [(1, 0), (1, 2)],
    [(1, 0), (-1, 3)],
    [(1, 1), (1, -1)],
    [(2, 1), (1, 2)],
)


def sl3_fan() -> DivisorialFan:
    D = ColoredPolyhedralDivisor(A1, RAY, {"0": interval(Fraction(1, 2))})
    return DivisorialFan([D], SL3)


def sl2_trivial_fan(colored: bool = False) -> DivisorialFan:
    from horosphere.rootdata import colors

    D = ColoredPolyhedralDivisor(A1, RAY, {}, colors(SL2) if colored else ())
    return DivisorialFan([D], SL2)


def six_item_fan() -> DivisorialFan:
    items = []
    for removed in (["inf"], ["0"]):
        for gens in ([(1,)], [(-1,)], []):
            base = CurveWithOpen.projective_line(removed)
            items.append(ColoredPolyhedralDivisor(base, Cone.from_generators(gens, 1), {}))
    return DivisorialFan(items, SL2)


def _fraction(rng: random.Random) -> Fraction:
    d = rng.randint(2, 6)
    return Fraction(rng.randint(1, d - 1), d)


def random_proper_divisor(rng: random.Random) -> ColoredPolyhedralDivisor:
    """A proper divisor over P^1 with at most four special points.

    Vertex denominators are at most 6.  The last point is shifted so that the
    degree polytope sits just above zero, which is where rationality is
    decided, so both verdicts occur often.
    """
    n = rng.choice([1, 2])
    tail = Cone.from_generators(rng.choice([[(1,)]] if n == 1 else RANK2_TAILS), n)
    while True:
        points = ["0", "1", "2", "inf"][: rng.randint(2, 4)]
        verts = {}
        for z in points:
            base = tuple(_fraction(rng) - 1 for _ in range(n))
            extra = [tuple(b + rng.randint(0, 2) for b in base)] if rng.random() < 0.3 else []
            verts[z] = [base] + extra
        total = [sum(verts[z][0][i] for z in points) for i in range(n)]
        shift = [-math.floor(x) + rng.randint(0, 1) for x in total]
        last = points[-1]
        verts[last] = [tuple(a + b for a, b in zip(v, shift)) for v in verts[last]]
        coeffs = {z: Polyhedron(v, tail) for z, v in verts.items()}
        D = ColoredPolyhedralDivisor(P1, tail, coeffs)
        if is_proper(D):
            return D


def affine_part(D: ColoredPolyhedralDivisor) -> ColoredPolyhedralDivisor:
    """The restriction of ``D`` to the chart without ``inf``."""
    return ColoredPolyhedralDivisor(A1, D.tail, {z: P for z, P in D.coeffs.items() if z != "inf"})


def torus_fan(D: ColoredPolyhedralDivisor) -> DivisorialFan:
    return DivisorialFan([D], TORUS[D.rank])


# Oracles -------------------------------------------------------------------

def det(rows) -> Fraction:
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def determinantal_divisors(rows, ncols: int) -> list[int]:
    """``d_k`` = gcd of all k x k minors; invariant factors are ``d_k / d_(k-1)``."""
    out = []
    for k in range(1, min(len(rows), ncols) + 1):
        g = 0
        for R in itertools.combinations(range(len(rows)), k):
            for C in itertools.combinations(range(ncols), k):
                g = math.gcd(g, int(det([[rows[i][j] for j in C] for i in R])))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors_oracle(rows, ncols: int) -> list[int]:
    d = determinantal_divisors(rows, ncols)
    return [b // a for a, b in zip([1] + d, d)]


def reflection_group_order(form) -> int:
    """Order of the group generated by simple reflections, by closure.

    ``form`` is the Cartan matrix ``A[i][j] = <alpha_j, alpha_i^vee>``; the
    reflection ``s_i`` acts on simple-root coordinates by
    ``x -> x - <x, alpha_i^vee> e_i``.
    """
    n = len(form)
    gens = []
    for i in range(n):
        M = [[int(r == c) for c in range(n)] for r in range(n)]
        for c in range(n):
            M[i][c] -= form[i][c]
        gens.append(tuple(map(tuple, M)))

    def mul(A, B):
        return tuple(tuple(sum(A[r][k] * B[k][c] for k in range(n)) for c in range(n)) for r in range(n))

    identity = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)

"""Root data of simply connected reductive groups and horospherical pairs.

Characters of the maximal torus are written in the basis of fundamental
weights of each simple factor followed by the standard characters of the
central torus.  In these coordinates the pairing with a simple coroot
``alpha_i`` is simply the ``i``-th coordinate, which turns the condition on
``(M, I)`` into an integer-matrix condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Sequence

from .lattice import IntMatrix, rational_rank

_EXCEPTIONAL_WEYL = {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600, ("F", 4): 1152, ("G", 2): 12}


class DatumError(ValueError):
    """The pair (M, I) violates the horospherical condition or is malformed."""


def _bilinear_form(kind: str, n: int) -> list[list[int]]:
    """Twice the invariant form on simple roots, Bourbaki numbering."""
    B = [[0] * n for _ in range(n)]

    def link(i, j, value):
        B[i][j] = B[j][i] = value

    if kind == "A":
        if n < 1:
            raise DatumError("type A needs rank >= 1")
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 1):
            link(i, i + 1, -1)
    elif kind == "B":
        if n < 2:
            raise DatumError("type B needs rank >= 2")
        for i in range(n - 1):
            B[i][i] = 2
            if i < n - 2:
                link(i, i + 1, -1)
        B[n - 1][n - 1] = 1
        link(n - 2, n - 1, -1)
    elif kind == "C":
        if n < 2:
            raise DatumError("type C needs rank >= 2")
        for i in range(n - 1):
            B[i][i] = 2
            if i < n - 2:
                link(i, i + 1, -1)
        B[n - 1][n - 1] = 4
        link(n - 2, n - 1, -2)
    elif kind == "D":
        if n < 3:
            raise DatumError("type D needs rank >= 3")
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 2):
            link(i, i + 1, -1)
        link(n - 3, n - 1, -1)
    elif kind == "E":
        if n not in (6, 7, 8):
            raise DatumError("type E exists in ranks 6, 7, 8")
        for i in range(n):
            B[i][i] = 2
        link(0, 2, -1)
        link(1, 3, -1)
        for i in range(2, n - 1):
            link(i, i + 1, -1)
    elif kind == "F":
        if n != 4:
            raise DatumError("type F exists only in rank 4")
        for i, v in enumerate((4, 4, 2, 2)):
            B[i][i] = v
        link(0, 1, -2)
        link(1, 2, -2)
        link(2, 3, -1)
    elif kind == "G":
        if n != 2:
            raise DatumError("type G exists only in rank 2")
        B[0][0], B[1][1] = 2, 6
        link(0, 1, -3)
    else:
        raise DatumError(f"unknown Dynkin type {kind!r}")
    return B


@dataclass(frozen=True)
class RootDatum:
    """Root datum of ``G = G_1 x ... x G_k x torus`` with ``G_i`` simply connected simple.

    Simple roots are numbered globally ``alpha1, alpha2, ...`` in factor order.
    """

    simple_factors: tuple[tuple[str, int], ...]
    torus_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "simple_factors", tuple((str(t).upper(), int(r)) for t, r in self.simple_factors))
        if self.torus_rank < 0:
            raise DatumError("torus rank must be nonnegative")
        for t, r in self.simple_factors:
            _bilinear_form(t, r)

    @cached_property
    def semisimple_rank(self) -> int:
        return sum(r for _, r in self.simple_factors)

    @property
    def character_rank(self) -> int:
        return self.semisimple_rank + self.torus_rank

    @cached_property
    def simple_roots(self) -> tuple[str, ...]:
        return tuple(f"alpha{i + 1}" for i in range(self.semisimple_rank))

    @cached_property
    def form(self) -> tuple[tuple[int, ...], ...]:
        n = self.semisimple_rank
        B = [[0] * n for _ in range(n)]
        off = 0
        for t, r in self.simple_factors:
            block = _bilinear_form(t, r)
            for i in range(r):
                for j in range(r):
                    B[off + i][off + j] = block[i][j]
            off += r
        return tuple(tuple(row) for row in B)

    @cached_property
    def cartan(self) -> IntMatrix:
        """``A[i][j] = <alpha_i, alpha_j^vee>``."""
        B = self.form
        n = self.semisimple_rank
        rows = [[2 * B[i][j] // B[j][j] for j in range(n)] for i in range(n)]
        return IntMatrix.from_rows(rows, n)

    def index(self, alpha: str) -> int:
        try:
            return self.simple_roots.index(alpha)
        except ValueError:
            raise DatumError(f"unknown simple root {alpha!r}") from None

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        """Positive roots in simple-root coordinates, sorted by height."""
        n = self.semisimple_rank
        A = self.cartan
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        roots = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(n):
                    # p = how far down the alpha_i string through beta goes
                    p = 0
                    while True:
                        down = list(beta)
                        down[i] -= p + 1
                        if tuple(down) in roots:
                            p += 1
                        else:
                            break
                    pairing = sum(beta[j] * A[j, i] for j in range(n))
                    q = p - pairing
                    if q > 0:
                        up = list(beta)
                        up[i] += 1
                        up = tuple(up)
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            layer = nxt
        return tuple(sorted(roots, key=lambda r: (sum(r), tuple(-x for x in r))))

    def coroot_pairing(self, weight: Sequence[int], alpha: str) -> int:
        """``<weight, alpha^vee>`` for a character in weight coordinates."""
        if len(weight) != self.character_rank:
            raise DatumError(f"character of length {len(weight)}, expected {self.character_rank}")
        return int(weight[self.index(alpha)])

    def root_to_weight(self, beta: Sequence[int]) -> tuple[int, ...]:
        """Weight coordinates of a root given in simple-root coordinates."""
        n = self.semisimple_rank
        A = self.cartan
        return tuple(sum(beta[j] * A[j, i] for j in range(n)) for i in range(n)) + (0,) * self.torus_rank

    def roots_of(self, J: Iterable[str]) -> tuple[tuple[int, ...], ...]:
        """Positive roots of the Levi subsystem spanned by ``J``."""
        idx = {self.index(a) for a in J}
        return tuple(r for r in self.positive_roots if all(r[i] == 0 or i in idx for i in range(len(r))))

    def components(self, J: Iterable[str]) -> list[list[int]]:
        """Connected components of the Dynkin subdiagram on ``J`` (as index lists)."""
        idx = sorted({self.index(a) for a in J})
        B = self.form
        comps, seen = [], set()
        for i in idx:
            if i in seen:
                continue
            stack, comp = [i], []
            seen.add(i)
            while stack:
                a = stack.pop()
                comp.append(a)
                for b in idx:
                    if b not in seen and B[a][b] != 0:
                        seen.add(b)
                        stack.append(b)
            comps.append(sorted(comp))
        return comps


def _component_weyl_order(datum: RootDatum, comp: list[int]) -> int:
    n = len(comp)
    B = datum.form
    lengths = {B[i][i] for i in comp}
    npos = len([r for r in datum.positive_roots if all(r[i] == 0 or i in comp for i in range(len(r)))])
    if len(lengths) == 1:
        # simply laced: A_n has n(n+1)/2 positive roots, D_n has n(n-1), E_n the rest
        if npos == n * (n + 1) // 2:
            return factorial(n + 1)
        if n >= 4 and npos == n * (n - 1):
            return 2 ** (n - 1) * factorial(n)
        return _EXCEPTIONAL_WEYL[("E", n)]
    if n == 2 and npos == 6:
        return _EXCEPTIONAL_WEYL[("G", 2)]
    if n == 4 and npos == 24:
        return _EXCEPTIONAL_WEYL[("F", 4)]
    return 2 ** n * factorial(n)


@dataclass(frozen=True)
class Color:
    """The color ``D_alpha`` and its image in ``N``."""

    alpha: str
    image: tuple[int, ...]

    def __repr__(self) -> str:
        return f"Color({self.alpha}, {self.image})"


@dataclass(frozen=True)
class HorosphericalDatum:
    """A pair ``(M, I)``: rows of ``M_basis`` span ``M`` inside the character lattice."""

    root_datum: RootDatum
    M_basis: tuple[tuple[int, ...], ...]
    I: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "M_basis", tuple(tuple(int(x) for x in r) for r in self.M_basis))
        object.__setattr__(self, "I", frozenset(self.I))
        w = self.root_datum.character_rank
        for r in self.M_basis:
            if len(r) != w:
                raise DatumError(f"M basis row {r} has length {len(r)}, expected {w}")
        if self.M_basis and rational_rank(self.M_basis) != len(self.M_basis):
            raise DatumError("M basis rows are linearly dependent")
        for a in self.I:
            self.root_datum.index(a)

    @property
    def rank(self) -> int:
        return len(self.M_basis)

    @property
    def simple_roots(self) -> tuple[str, ...]:
        return self.root_datum.simple_roots

    @property
    def color_roots(self) -> tuple[str, ...]:
        return tuple(a for a in self.simple_roots if a not in self.I)

    def pairing_violations(self) -> list[tuple[int, str, int]]:
        """``(row, alpha, value)`` for every nonzero ``<m, alpha^vee>`` with ``alpha in I``."""
        out = []
        for k, m in enumerate(self.M_basis):
            for a in sorted(self.I, key=self.root_datum.index):
                v = self.root_datum.coroot_pairing(m, a)
                if v:
                    out.append((k, a, v))
        return out

    def coroot_image(self, alpha: str) -> tuple[int, ...]:
        return tuple(self.root_datum.coroot_pairing(m, alpha) for m in self.M_basis)


def validate_datum(d: HorosphericalDatum) -> bool:
    return not d.pairing_violations()


def colors(d: HorosphericalDatum) -> list[Color]:
    return [Color(a, d.coroot_image(a)) for a in d.color_roots]


def a_alpha(d: HorosphericalDatum, alpha: str) -> int:
    """``< sum of positive roots outside the Levi of I , alpha^vee >``."""
    if alpha in d.I:
        raise DatumError(f"{alpha} lies in I")
    rd = d.root_datum
    i = rd.index(alpha)
    levi = set(rd.roots_of(d.I))
    A = rd.cartan
    n = rd.semisimple_rank
    total = 0
    for beta in rd.positive_roots:
        if beta not in levi:
            total += sum(beta[j] * A[j, i] for j in range(n))
    return total


def weyl_order(d: HorosphericalDatum | RootDatum, J: Iterable[str]) -> int:
    rd = d.root_datum if isinstance(d, HorosphericalDatum) else d
    out = 1
    for comp in rd.components(J):
        out *= _component_weyl_order(rd, comp)
    return out


def levi_subset(d: HorosphericalDatum, F: Iterable[Color | str]) -> frozenset[str]:
    names = {c.alpha if isinstance(c, Color) else c for c in F}
    bad = names & d.I
    if bad:
        raise DatumError(f"{sorted(bad)} are not colors")
    return frozenset(names) | d.I


def weyl_dim(d: HorosphericalDatum, m: Sequence[int], levi: Iterable[str] | None = None) -> int:
    """Dimension of the simple module of highest weight ``m`` for the Levi of ``levi``.

    ``m`` is given in ``M`` coordinates (w.r.t. ``M_basis``); the Levi defaults
    to the full simple-root set.
    """
    rd = d.root_datum
    if len(m) != d.rank:
        raise DatumError(f"element of M of length {len(m)}, expected {d.rank}")
    weight = [sum(c * row[i] for c, row in zip(m, d.M_basis)) for i in range(rd.character_rank)]
    J = set(rd.simple_roots) if levi is None else set(levi)
    for a in J:
        if weight[rd.index(a)] < 0:
            raise DatumError(f"weight {tuple(weight)} is not dominant for {a}")
    B = rd.form
    num = Fraction(1)
    for beta in rd.roots_of(J):
        # (lambda + rho, beta^vee) / (rho, beta^vee), using (alpha_i^vee length) weights
        top = sum(Fraction(c * B[i][i]) * (weight[i] + 1) for i, c in enumerate(beta) if c)
        bot = sum(Fraction(c * B[i][i]) for i, c in enumerate(beta) if c)
        num *= top / bot
    if num.denominator != 1:
        raise ArithmeticError("Weyl dimension formula returned a non-integer")
    return int(num)

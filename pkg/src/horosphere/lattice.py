"""Exact integer and rational linear algebra.

Everything here works on plain Python integers and :class:`fractions.Fraction`,
so results are exact at any size.  The main entry points are
:func:`smith_normal_form`, :func:`hermite_normal_form`, :func:`cokernel`,
:func:`solve_integer` and :func:`solve_rational`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction


class DimensionMismatch(ValueError):
    """Raised when matrix and vector shapes are incompatible."""


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(
                f"expected {self.rows}x{self.cols} entries, got {[len(r) for r in self.entries]}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise DimensionMismatch("cannot infer column count of an empty matrix")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self.column(j) for j in range(self.cols)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries),
        )

    def apply(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product ``A @ x``."""
        if len(vector) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vector)} for {self.cols} columns")
        return tuple(sum(a * x for a, x in zip(r, vector)) for r in self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.entries])

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def as_matrix(A, cols: int | None = None) -> IntMatrix:
    if isinstance(A, IntMatrix):
        return A
    return IntMatrix.from_rows(A, cols)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(A) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, S, V)`` with ``U @ A @ V == S`` in Smith normal form.

    ``U`` and ``V`` are unimodular.  ``S`` is diagonal with non-negative entries
    ``d1 | d2 | ...``.  Pivots are chosen as the nonzero entry of smallest
    absolute value, ties going to the lowest row and then the lowest column,
    so the transforms are deterministic.
    """
    A = as_matrix(A)
    m, n = A.rows, A.cols
    S = [list(r) for r in A.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        S[i], S[k] = S[k], S[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in S:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in S:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] != 0 and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                q = S[i][t] // S[t][t]
                if q:
                    add_row(i, t, -q)
                if S[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = S[t][j] // S[t][t]
                if q:
                    add_col(j, t, -q)
                if S[t][j]:
                    clean = False
            if not clean:
                # a smaller remainder appeared in row or column t; re-pivot on it
                best = None
                for i in range(t, m):
                    if S[i][t] and (best is None or abs(S[i][t]) < abs(S[best[0]][best[1]])):
                        best = (i, t)
                for j in range(t + 1, n):
                    if S[t][j] and (best is None or abs(S[t][j]) < abs(S[best[0]][best[1]])):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    return (
        IntMatrix.from_rows(U, m),
        IntMatrix.from_rows(S, n),
        IntMatrix.from_rows(V, n),
    )


def invariant_factors(A) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith normal form of ``A``."""
    _, S, _ = smith_normal_form(A)
    return tuple(d for d in S.diagonal() if d)


# ---------------------------------------------------------------------------
# Hermite normal form and integer kernels
# ---------------------------------------------------------------------------

def hermite_normal_form(A) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns ``(H, U)`` with ``U @ A == H``.

    ``H`` is upper echelon, pivots positive, entries above a pivot reduced to
    ``[0, pivot)``, and zero rows at the bottom.
    """
    A = as_matrix(A)
    m, n = A.rows, A.cols
    H = [list(r) for r in A.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        # gcd-combine column c over rows r..m-1 into row r
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _ext_gcd(a, b)
            ag, bg = a // g, b // g
            H[r], H[i] = (
                [x * p + y * q for p, q in zip(H[r], H[i])],
                [-bg * p + ag * q for p, q in zip(H[r], H[i])],
            )
            U[r], U[i] = (
                [x * p + y * q for p, q in zip(U[r], U[i])],
                [-bg * p + ag * q for p, q in zip(U[r], U[i])],
            )
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-p for p in H[r]]
            U[r] = [-p for p in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [p - q * s for p, s in zip(H[i], H[r])]
                U[i] = [p - q * s for p, s in zip(U[i], U[r])]
        r += 1
    return IntMatrix.from_rows(H, n), IntMatrix.from_rows(U, m)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_kernel(A) -> list[tuple[int, ...]]:
    """A basis of ``{x in Z^n : A x = 0}`` (saturated), via the HNF of ``A^T``."""
    A = as_matrix(A)
    n = A.cols
    if A.rows == 0:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    At = IntMatrix(n, A.rows, tuple(A.column(j) for j in range(n)))
    H, U = hermite_normal_form(At)
    return [U.row(i) for i in range(n) if not any(H.row(i))]


# ---------------------------------------------------------------------------
# Abelian group presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianGroupPresentation:
    """The group ``Z^gens / rowspan(relations)`` with its invariants."""

    generator_labels: tuple[str, ...]
    relations: IntMatrix
    invariant_factors: tuple[int, ...]
    free_rank: int
    notes: tuple[str, ...] = ()
    _transform: IntMatrix | None = field(default=None, repr=False, compare=False)
    _diagonal: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def class_of(self, coefficients: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a generator combination: torsion residues, then free part."""
        if len(coefficients) != len(self.generator_labels):
            raise DimensionMismatch("coefficient vector does not match generators")
        V = self._transform
        y = [sum(c * V[i, j] for i, c in enumerate(coefficients)) for j in range(V.cols)]
        torsion = [y[k] % d for k, d in enumerate(self._diagonal) if d > 1]
        free = y[len(self._diagonal):]
        return tuple(torsion) + tuple(free)

    def is_zero(self, coefficients: Sequence[int]) -> bool:
        return not any(self.class_of(coefficients))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"


def cokernel(A, labels: Sequence[str]) -> AbelianGroupPresentation:
    """Presentation of ``Z^len(labels)`` modulo the row span of ``A``."""
    labels = tuple(labels)
    A = as_matrix(A, cols=len(labels)) if not isinstance(A, IntMatrix) else A
    if A.cols != len(labels):
        raise DimensionMismatch(f"{A.cols} columns but {len(labels)} generator labels")
    _, S, V = smith_normal_form(A)
    diag = tuple(d for d in S.diagonal() if d)
    return AbelianGroupPresentation(
        generator_labels=labels,
        relations=A,
        invariant_factors=tuple(d for d in diag if d > 1),
        free_rank=A.cols - len(diag),
        _transform=V,
        _diagonal=diag,
    )


# ---------------------------------------------------------------------------
# Linear systems
# ---------------------------------------------------------------------------

def solve_integer(A, b: Sequence[int]) -> tuple[int, ...] | None:
    """One integral solution of ``A x = b``, or ``None`` if there is none.

    The full solution set is ``x + integer_kernel(A)``.
    """
    A = as_matrix(A, cols=None if not isinstance(A, IntMatrix) else A.cols)
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} rows")
    U, S, V = smith_normal_form(A)
    c = U.apply(tuple(int(x) for x in b))
    y = [0] * A.cols
    for i in range(A.rows):
        d = S[i, i] if i < A.cols else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    return V.apply(y)


def min_integral_multiple(A, b: Sequence) -> int | None:
    """Smallest ``d > 0`` such that ``A x = d*b`` has an integral solution.

    ``b`` may be rational.  Returns ``None`` when ``A x = b`` has no rational
    solution at all.
    """
    A = as_matrix(A, cols=None if not isinstance(A, IntMatrix) else A.cols)
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} rows")
    b = [Fraction(x) for x in b]
    den = 1
    for x in b:
        den = den * x.denominator // gcd(den, x.denominator)
    U, S, _ = smith_normal_form(A)
    c = U.apply(tuple(int(x * den) for x in b))
    # A x = d b  <=>  S y = (d/den) c
    need = 1
    for i in range(A.rows):
        s = S[i, i] if i < A.cols else 0
        if s == 0:
            if c[i] != 0:
                return None
            continue
        # d * c_i / den must be a multiple of s
        modulus = s * den
        k = modulus // gcd(modulus, c[i])
        need = need * k // gcd(need, k)
    return need


@dataclass(frozen=True)
class RationalSolution:
    witness: tuple[Fraction, ...]
    kernel: tuple[tuple[Fraction, ...], ...]


def rational_rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns ``(R, pivot_columns)``."""
    R = [[Fraction(x) for x in row] for row in A]
    pivots: list[int] = []
    r = 0
    ncols = len(R[0]) if R else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def solve_rational(A: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> RationalSolution | None:
    """Solve ``A x = b`` over Q by Gaussian elimination.

    Returns a witness solution and a kernel basis, or ``None`` if the system
    is inconsistent.
    """
    if isinstance(A, IntMatrix):
        ncols, A = A.cols, A.tolist()
    rows = [list(r) for r in A]
    if ncols is None:
        if not rows:
            raise DimensionMismatch("cannot infer column count of an empty system")
        ncols = len(rows[0])
    if len(b) != len(rows):
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {len(rows)} rows")
    if any(len(r) != ncols for r in rows):
        raise DimensionMismatch("ragged coefficient matrix")
    aug = [r + [x] for r, x in zip(rows, b)]
    if not aug:
        kernel = tuple(tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols))
        return RationalSolution((Fraction(0),) * ncols, kernel)
    R, pivots = rational_rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = R[i][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][f]
        kernel.append(tuple(v))
    return RationalSolution(tuple(x), tuple(kernel))


def rational_rank(A: Sequence[Sequence]) -> int:
    rows = [list(r) for r in A]
    if not rows or not rows[0]:
        return 0
    return len(rational_rref(rows)[1])


def rational_nullspace(A: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel of ``A`` over Q."""
    sol = solve_rational([list(r) for r in A], [0] * len(A), ncols=ncols)
    return list(sol.kernel)


def primitive(v: Sequence) -> tuple[int, ...]:
    """Primitive integer vector on the ray through the rational vector ``v``."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def lcm_denominators(v: Iterable) -> int:
    den = 1
    for x in v:
        d = Fraction(x).denominator
        den = den * d // gcd(den, d)
    return den


# ---------------------------------------------------------------------------
# Sparse systems
# ---------------------------------------------------------------------------

SparseRow = dict[int, int]


@dataclass
class SparseReduction:
    """A system after integral elimination of all unit-coefficient pivots.

    ``rows``/``rhs`` is the leftover system on ``columns``; ``steps`` records
    each pivot ``(k, sign, row, rhs)`` so that eliminated unknowns can be
    recovered as ``x_k = sign * (rhs - sum row[j] x_j)``.
    """

    ncols: int
    rows: list[SparseRow]
    rhs: list[Fraction]
    steps: list[tuple[int, int, SparseRow, Fraction]]
    consistent: bool = True

    @property
    def columns(self) -> list[int]:
        return sorted({j for r in self.rows for j in r})

    def dense(self) -> tuple[IntMatrix, list[int]]:
        cols = self.columns
        where = {j: t for t, j in enumerate(cols)}
        entries = []
        for r in self.rows:
            row = [0] * len(cols)
            for j, a in r.items():
                row[where[j]] = a
            entries.append(tuple(row))
        return IntMatrix(len(entries), len(cols), tuple(entries)), cols

    def back_substitute(self, values: dict[int, Fraction], scale=1) -> tuple:
        x = [Fraction(0)] * self.ncols
        for j, v in values.items():
            x[j] = Fraction(v)
        for k, sign, row, b in reversed(self.steps):
            x[k] = sign * (scale * b - sum(a * x[j] for j, a in row.items() if j != k))
        return tuple(x)


def reduce_sparse(rows: Sequence[SparseRow], rhs: Sequence, ncols: int) -> SparseReduction:
    """Eliminate unknowns with coefficient ``+-1`` by integral substitution.

    Substitution preserves the integer (and rational) solution sets, so
    the leftover system is usually small enough for a dense Smith form.
    """
    active = {i: {j: int(a) for j, a in r.items() if a} for i, r in enumerate(rows)}
    b = {i: Fraction(x) for i, x in enumerate(rhs)}
    where: dict[int, set[int]] = {}
    for i, r in active.items():
        for j in r:
            where.setdefault(j, set()).add(i)
    steps = []
    out = SparseReduction(ncols, [], [], steps)
    while True:
        for i in [i for i, r in active.items() if not r]:
            if b[i] != 0:
                out.consistent = False
                return out
            del active[i]
        best = None
        for i, r in active.items():
            if best is not None and len(r) >= len(active[best[0]]):
                continue
            unit = next((j for j in sorted(r) if abs(r[j]) == 1), None)
            if unit is not None:
                best = (i, unit)
        if best is None:
            break
        i, k = best
        row = active.pop(i)
        bi = b.pop(i)
        sign = row[k]
        for j in row:
            where[j].discard(i)
        for t in list(where.get(k, ())):
            tr = active[t]
            f = tr[k] * sign
            for j, a in row.items():
                v = tr.get(j, 0) - f * a
                if v:
                    if j not in tr:
                        where.setdefault(j, set()).add(t)
                    tr[j] = v
                elif j in tr:
                    del tr[j]
                    where[j].discard(t)
            b[t] -= f * bi
        steps.append((k, sign, row, bi))
    seen = set()
    for i in sorted(active):
        key = (tuple(sorted(active[i].items())), b[i])
        if key not in seen:
            seen.add(key)
            out.rows.append(active[i])
            out.rhs.append(b[i])
    return out


def solve_integer_sparse(rows: Sequence[SparseRow], rhs: Sequence[int], ncols: int) -> tuple[int, ...] | None:
    """:func:`solve_integer` for sparse systems with many unit pivots."""
    red = reduce_sparse(rows, rhs, ncols)
    if not red.consistent:
        return None
    values: dict[int, Fraction] = {}
    if red.rows:
        A, cols = red.dense()
        if any(x.denominator != 1 for x in red.rhs):
            return None
        y = solve_integer(A, [int(x) for x in red.rhs])
        if y is None:
            return None
        values = dict(zip(cols, y))
    x = red.back_substitute(values)
    assert all(v.denominator == 1 for v in x)
    return tuple(int(v) for v in x)


def min_integral_multiple_sparse(rows: Sequence[SparseRow], rhs: Sequence, ncols: int) -> tuple[int, tuple[int, ...]] | None:
    """Smallest ``d`` with ``A x = d b`` integrally solvable, and a solution."""
    red = reduce_sparse(rows, rhs, ncols)
    if not red.consistent:
        return None
    values: dict[int, Fraction] = {}
    # admissible d form a subgroup of Z: intersect the one from the leftover
    # system with the one clearing the pivot right-hand sides
    d = lcm_denominators(b for *_, b in red.steps)
    if red.rows:
        A, cols = red.dense()
        d0 = min_integral_multiple(A, red.rhs)
        if d0 is None:
            return None
        d = d * d0 // gcd(d, d0)
        y = solve_integer(A, [int(d * x) for x in red.rhs])
        values = dict(zip(cols, y))
    x = red.back_substitute(values, d)
    assert all(v.denominator == 1 for v in x)
    return d, tuple(int(v) for v in x)

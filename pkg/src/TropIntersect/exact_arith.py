"""Exact integer and rational linear algebra on top of python-flint.

Integer matrices go through ``fmpz_mat`` (Hermite normal form, rank), rational
ones through ``fmpq_mat`` (reduced row echelon form, determinant). Results are
handed back as plain tuples of ``int`` and ``Fraction``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat, fmpz_mat

from .errors import SpanMismatch

logger = logging.getLogger(__name__)

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense integer matrix stored row-major."""

    rows: tuple[IntVector, ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "IntegerMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(data[0])
        if any(len(row) != ncols for row in data):
            raise ValueError("All rows must have the same length")
        return cls(rows=data, ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls.from_rows(([1 if i == j else 0 for j in range(n)] for i in range(n)), ncols=n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> IntVector:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[IntVector]:
        return [self.column(j) for j in range(self.ncols)]

    def to_flint(self) -> fmpz_mat:
        return fmpz_mat(self.nrows, self.ncols, [x for row in self.rows for x in row])

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.ncols != other.nrows:
            raise ValueError("Shape mismatch in matrix product")
        if not self.nrows or not other.ncols:
            return IntegerMatrix.from_rows([[0] * other.ncols for _ in range(self.nrows)], ncols=other.ncols)
        return _from_fmpz_mat(self.to_flint() * other.to_flint(), other.ncols)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("Determinant needs a square matrix")
        if not self.nrows:
            return 1
        return int(self.to_flint().det())


@dataclass(frozen=True)
class HnfResult:
    hnf: IntegerMatrix
    transform: IntegerMatrix
    rank: int


def _as_matrix(m: IntegerMatrix | Sequence[Sequence[int]], ncols: int | None = None) -> IntegerMatrix:
    if isinstance(m, IntegerMatrix):
        return m
    return IntegerMatrix.from_rows(m, ncols=ncols)


def _from_fmpz_mat(m: fmpz_mat, ncols: int) -> IntegerMatrix:
    return IntegerMatrix.from_rows(([int(x) for x in row] for row in m.tolist()), ncols=ncols)


def hnf(m: IntegerMatrix | Sequence[Sequence[int]], ncols: int | None = None) -> HnfResult:
    """Hermite normal form by unimodular column operations.

    Returns ``H = m @ U`` of the shape ``(0 | T)``: the triangular block ``T``
    occupies the last ``rank`` columns, its pivots are positive and every entry
    right of a pivot lies in ``[0, pivot)``. For rank-deficient input the rows
    without a pivot are skipped.

    flint only reduces rows, so the row HNF of ``[m^T reversed | I]`` is taken
    and read back: its left block is ``H`` and its right block is ``U``, both
    transposed and reflected.
    """
    mat = _as_matrix(m, ncols)
    nrows, n = mat.nrows, mat.ncols
    if nrows == 0 or not any(any(row) for row in mat.rows):
        return HnfResult(hnf=mat, transform=IntegerMatrix.identity(n), rank=0)
    augmented = [
        [mat.rows[nrows - 1 - i][j] for i in range(nrows)] + [1 if j == k else 0 for k in range(n)]
        for j in range(n)
    ]
    reduced = [[int(x) for x in row] for row in fmpz_mat(augmented).hnf().tolist()]
    left = [row[:nrows] for row in reduced]
    right = [row[nrows:] for row in reduced]
    rank = sum(1 for row in left if any(row))
    return HnfResult(
        hnf=IntegerMatrix.from_rows(
            ([left[n - 1 - j][nrows - 1 - i] for j in range(n)] for i in range(nrows)), ncols=n
        ),
        transform=IntegerMatrix.from_rows(([right[n - 1 - j][i] for j in range(n)] for i in range(n)), ncols=n),
        rank=rank,
    )


def kernel_lattice_basis(m: IntegerMatrix | Sequence[Sequence[int]], ncols: int | None = None) -> list[IntVector]:
    """Lattice basis of ``ker(m) ∩ Z^ncols``, in canonical form."""
    mat = _as_matrix(m, ncols)
    if mat.nrows == 0:
        return unit_vectors(mat.ncols)
    result = hnf(mat)
    free = mat.ncols - result.rank
    basis = [result.transform.column(j) for j in range(free)]
    return canonical_lattice_basis(basis, mat.ncols)


def unit_vectors(n: int) -> list[IntVector]:
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def canonical_lattice_basis(generators: Sequence[Sequence[int]], n: int) -> list[IntVector]:
    """Basis of the lattice Z-generated by ``generators`` in Hermite form.

    Two generating sets of the same lattice give the same output.
    """
    gens = [tuple(int(x) for x in g) for g in generators if any(g)]
    if not gens:
        return []
    transposed = IntegerMatrix.from_rows(([g[i] for g in gens] for i in range(n)), ncols=len(gens))
    result = hnf(transposed)
    cols = result.hnf.columns()
    basis = [c for c in cols[len(gens) - result.rank:]]
    return sorted(basis, reverse=True)


def lattice_basis_of_span(vectors: Sequence[Sequence[int | Fraction]], n: int | None = None) -> list[IntVector]:
    """Lattice basis of ``span_R(vectors) ∩ Z^n`` (the saturation)."""
    rows = [integral_vector(v) for v in vectors if any(v)]
    if n is None:
        if not vectors:
            return []
        n = len(vectors[0])
    if not rows:
        return []
    equations = kernel_lattice_basis(rows, ncols=n)
    if not equations:
        return unit_vectors(n)
    return kernel_lattice_basis(equations, ncols=n)


def lattice_index(
    generators_a: Sequence[Sequence[int]],
    generators_b: Sequence[Sequence[int]],
    n: int | None = None,
) -> int:
    """Index ``[L_b : L_a]`` of two lattices spanning the same vector space."""
    if n is None:
        sample = list(generators_a) + list(generators_b)
        if not sample:
            return 1
        n = len(sample[0])
    basis_a = canonical_lattice_basis(generators_a, n)
    basis_b = canonical_lattice_basis(generators_b, n)
    r = len(basis_a)
    if r != len(basis_b) or rank(list(basis_a) + list(basis_b)) != r:
        raise SpanMismatch("Generating sets span different vector spaces")
    if r == 0:
        return 1
    pivots = pivot_columns(basis_b)
    det_a = determinant([[row[j] for j in pivots] for row in basis_a])
    det_b = determinant([[row[j] for j in pivots] for row in basis_b])
    index = abs(Fraction(det_a) / Fraction(det_b))
    if index.denominator != 1:
        raise SpanMismatch("First lattice is not contained in the second one")
    return int(index)


def index_in_saturation(vectors: Sequence[Sequence[int]], n: int) -> int:
    """Index of the lattice generated by ``vectors`` in its saturation."""
    if not any(any(v) for v in vectors):
        return 1
    return lattice_index(vectors, lattice_basis_of_span(vectors, n), n)




# --- rational linear algebra -------------------------------------------------


def to_fraction_rows(rows: Iterable[Iterable[int | Fraction]]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def _to_fmpq_mat(rows: Sequence[Sequence[int | Fraction]], ncols: int) -> fmpq_mat:
    entries = [fmpq(Fraction(x).numerator, Fraction(x).denominator) for row in rows for x in row]
    return fmpq_mat(len(rows), ncols, entries)


def _fraction(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def row_echelon(rows: Sequence[Sequence[int | Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form together with its pivot columns."""
    if not rows or not len(rows[0]):
        return [], []
    ncols = len(rows[0])
    reduced, r = _to_fmpq_mat(rows, ncols).rref()
    a = [[_fraction(reduced[i, j]) for j in range(ncols)] for i in range(int(r))]
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in a]
    return a, pivots


def rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    return len(row_echelon(rows)[1])


def pivot_columns(rows: Sequence[Sequence[int | Fraction]]) -> list[int]:
    return row_echelon(rows)[1]


def nullspace(rows: Sequence[Sequence[int | Fraction]], ncols: int) -> list[RatVector]:
    """Rational basis of ``{x : rows · x = 0}``, one vector per free column of the echelon form."""
    reduced, pivots = row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[RatVector] = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(tuple(vec))
    return basis


def solve(rows: Sequence[Sequence[int | Fraction]], rhs: Sequence[int | Fraction]) -> RatVector | None:
    """One solution of ``rows · x = rhs`` or ``None`` if inconsistent."""
    if not rows:
        return None if any(rhs) else ()
    ncols = len(rows[0])
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = row_echelon(augmented)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[-1]
    return tuple(x)


def determinant(rows: Sequence[Sequence[int | Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return _fraction(_to_fmpq_mat(rows, len(rows)).det())


def in_span(vector: Sequence[int | Fraction], rows: Sequence[Sequence[int | Fraction]]) -> bool:
    if not any(vector):
        return True
    return rank(list(rows) + [vector]) == rank(rows)


def dot(u: Sequence[int | Fraction], v: Sequence[int | Fraction]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def integral_vector(v: Sequence[int | Fraction]) -> IntVector:
    """Scale a rational vector to an integral one (not necessarily primitive)."""
    fracs = [Fraction(x) for x in v]
    lcm = math.lcm(*(x.denominator for x in fracs)) if fracs else 1
    return tuple(int(x * lcm) for x in fracs)


def primitive(v: Sequence[int | Fraction]) -> IntVector:
    """Primitive integral vector on the ray through ``v``."""
    ints = integral_vector(v)
    g = math.gcd(*ints) if ints else 0
    if g == 0:
        return ints
    return tuple(x // g for x in ints)


def lex_positive(v: Sequence[int]) -> IntVector:
    """Return ``v`` or ``-v``, whichever has a positive first nonzero entry."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def transpose(rows: Sequence[Sequence[int | Fraction]], ncols: int) -> list[list[int | Fraction]]:
    return [[row[j] for row in rows] for j in range(ncols)]

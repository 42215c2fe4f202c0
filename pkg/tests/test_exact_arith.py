import itertools
import random
from fractions import Fraction

import pytest

from TropIntersect.errors import SpanMismatch
from TropIntersect.exact_arith import (
    IntegerMatrix,
    canonical_lattice_basis,
    determinant,
    dot,
    hnf,
    index_in_saturation,
    kernel_lattice_basis,
    lattice_basis_of_span,
    lattice_index,
    lex_positive,
    nullspace,
    primitive,
    rank,
    solve,
    transpose,
)


def _assert_hermite_shape(result):
    rows = result.hnf.rows
    n, r = result.hnf.ncols, result.rank
    assert all(row[j] == 0 for row in rows for j in range(n - r))
    previous = len(rows)
    for k in range(n - 1, n - r - 1, -1):
        i = max(i for i, row in enumerate(rows) if row[k] != 0)
        assert i < previous
        assert rows[i][k] > 0
        assert all(0 <= rows[i][j] < rows[i][k] for j in range(k + 1, n))
        previous = i


def test_hnf_of_diagonal_and_zero_matrices():
    result = hnf([[2, 0], [0, 2]])
    assert result.hnf.rows == ((2, 0), (0, 2))
    assert result.transform == IntegerMatrix.identity(2)
    identity = hnf(IntegerMatrix.identity(3))
    assert identity.hnf == IntegerMatrix.identity(3)
    assert identity.transform == IntegerMatrix.identity(3)
    zero = hnf([[0, 0, 0]])
    assert zero.rank == 0
    assert zero.transform == IntegerMatrix.identity(3)


def test_hnf_has_hermite_shape():
    rng = random.Random(11)
    for _ in range(30):
        m = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(2)]
        result = hnf(m)
        assert IntegerMatrix.from_rows(m) @ result.transform == result.hnf
        _assert_hermite_shape(result)


def test_primitive_row_pivot_is_the_gcd():
    result = hnf([[6, 10, 15]])
    assert result.hnf.rows == ((0, 0, 1),)
    u = result.transform.column(2)
    assert dot((6, 10, 15), u) == 1


def test_hnf_is_unimodular_transform_of_input():
    rng = random.Random(3)
    for _ in range(20):
        m = IntegerMatrix.from_rows([[rng.randint(-4, 4) for _ in range(4)] for _ in range(3)])
        result = hnf(m)
        assert abs(result.transform.det()) == 1
        assert m @ result.transform == result.hnf
        assert result.rank == rank(m.rows)
        # leading columns outside the triangular block vanish
        free = m.ncols - result.rank
        assert all(row[j] == 0 for row in result.hnf.rows for j in range(free))


def test_kernel_lattice_basis_is_saturated():
    basis = kernel_lattice_basis([[1, 1, 1]], ncols=3)
    assert len(basis) == 2
    assert all(dot(v, (1, 1, 1)) == 0 for v in basis)
    assert index_in_saturation(basis, 3) == 1


def test_canonical_basis_ignores_generating_set():
    first = canonical_lattice_basis([(1, 0, 1), (0, 1, 1)], 3)
    second = canonical_lattice_basis([(1, 1, 2), (0, 1, 1), (2, 1, 3)], 3)
    assert first == second


def test_lattice_index_of_sublattice():
    assert lattice_index([(2, 0), (0, 1)], [(1, 0), (0, 1)]) == 2
    assert lattice_index([(1, 1), (1, -1)], [(1, 0), (0, 1)]) == 2
    assert lattice_index([(3, 3)], [(1, 1)]) == 3


def test_lattice_index_rejects_different_spans():
    with pytest.raises(SpanMismatch):
        lattice_index([(1, 0)], [(0, 1)])


def test_saturation_of_rational_span():
    assert [lex_positive(v) for v in lattice_basis_of_span([(Fraction(1, 2), 1)])] == [(1, 2)]
    assert index_in_saturation([(2, 2)], 2) == 2


def test_rational_linear_algebra():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(rows) == 2
    assert determinant(rows) == 0
    assert determinant([[2, 1], [1, 1]]) == 1
    for v in nullspace(rows, 3):
        assert all(dot(row, v) == 0 for row in rows)
    x = solve([[1, 1], [1, -1]], [3, 1])
    assert x == (Fraction(2), Fraction(1))
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_primitive_and_sign_normalisation():
    assert primitive((2, 4, -6)) == (1, 2, -3)
    assert primitive((Fraction(1, 2), Fraction(1, 3))) == (3, 2)
    assert primitive((0, 0)) == (0, 0)
    assert lex_positive((0, -1, 2)) == (0, 1, -2)


def test_kernel_basis_against_a_brute_force_scan():
    rng = random.Random(5)
    for _ in range(10):
        m = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(2)]
        basis = kernel_lattice_basis(m, ncols=3)
        assert all(all(dot(row, v) == 0 for row in m) for v in basis)
        assert len(basis) == 3 - rank(m)
        for x in itertools.product(range(-3, 4), repeat=3):
            if all(dot(row, x) == 0 for row in m):
                coordinates = solve(transpose(basis, 3), x)
                assert coordinates is not None
                assert all(c.denominator == 1 for c in coordinates)


def test_lattice_index_against_counting_cosets():
    rng = random.Random(9)
    for _ in range(10):
        a = [(rng.randint(1, 4), rng.randint(-3, 3)), (0, rng.randint(1, 4))]
        det = abs(a[0][0] * a[1][1] - a[0][1] * a[1][0])
        # cosets of L_a in Z^2 are represented by the points of a fundamental box
        cosets = set()
        for x, y in itertools.product(range(det), repeat=2):
            t = solve([[a[0][0], a[1][0]], [a[0][1], a[1][1]]], [x, y])
            cosets.add(tuple(c - (c.numerator // c.denominator) for c in t))
        assert lattice_index(a, [(1, 0), (0, 1)]) == det == len(cosets)


def _nonsingular(rng):
    while True:
        m = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
        if m[0][0] * m[1][1] - m[0][1] * m[1][0]:
            return m


def test_lattice_index_is_multiplicative_along_a_chain():
    rng = random.Random(21)
    for _ in range(10):
        c = _nonsingular(rng)
        s = _nonsingular(rng)
        a = [tuple(s[i][0] * c[0][k] + s[i][1] * c[1][k] for k in range(2)) for i in range(2)]
        b = [(1, 0), (0, 1)]
        assert lattice_index(a, c) == abs(s[0][0] * s[1][1] - s[0][1] * s[1][0])
        assert lattice_index(a, b) == lattice_index(a, c) * lattice_index(c, b)


def test_lattice_index_chain_in_the_plane():
    a = [(4, 0), (0, 6)]
    b = [(2, 0), (0, 3)]
    c = [(1, 0), (0, 1)]
    assert lattice_index(a, b) == 4
    assert lattice_index(b, c) == 6
    assert lattice_index(a, c) == lattice_index(a, b) * lattice_index(b, c)

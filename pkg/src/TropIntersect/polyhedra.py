"""Rational polyhedra with both H- and V-descriptions.

Internally a polyhedron P ⊂ R^n lives in homogeneous coordinates: a vertex v is
the vector (1, v), a ray r is (0, r), and an inequality row (c0, c) means
c0 + <c, x> >= 0, which is also the row convention of cddlib. Both conversions
run cddlib's double description in exact fraction arithmetic.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import cdd

from .errors import AmbientMismatch, EmptyPolyhedron
from .exact_arith import (
    IntVector,
    RatVector,
    dot,
    kernel_lattice_basis,
    lattice_basis_of_span,
    primitive,
    rank,
    row_echelon,
)

logger = logging.getLogger(__name__)

Number = int | Fraction


@dataclass(frozen=True)
class HDescription:
    """Rows (c0, c1..cn) meaning ``c0 + <c, x> >= 0`` (resp. ``= 0`` for equations)."""

    inequalities: tuple[IntVector, ...] = ()
    equations: tuple[IntVector, ...] = ()

    def normal_offset_pairs(self) -> list[tuple[IntVector, Fraction]]:
        """Inequalities as ``(normal, offset)`` meaning ``<x, normal> >= offset``."""
        return [(row[1:], Fraction(-row[0])) for row in self.inequalities]


@dataclass(frozen=True)
class VDescription:
    vertices: tuple[RatVector, ...] = ()
    rays: tuple[IntVector, ...] = ()
    lineality: tuple[IntVector, ...] = ()


# --- conversion through cddlib ---------------------------------------------------


def _cdd_matrix(rows: Sequence[Sequence[Number]], linear: Sequence[Sequence[Number]], rep_type) -> cdd.Matrix:
    mat = cdd.Matrix([[Fraction(x) for x in row] for row in rows], number_type="fraction")
    if linear:
        mat.extend([[Fraction(x) for x in row] for row in linear], linear=True)
    mat.rep_type = rep_type
    return mat


def _split_rows(mat: cdd.Matrix) -> tuple[list[tuple[Fraction, ...]], list[tuple[Fraction, ...]]]:
    """Rows of a cdd matrix as (ordinary rows, rows of the linearity set)."""
    ordinary, linear = [], []
    for i in range(mat.row_size):
        row = tuple(Fraction(x) for x in mat[i])
        (linear if i in mat.lin_set else ordinary).append(row)
    return ordinary, linear


def _reduce_modulo(vector: Sequence[Number], basis_rref: list[list[Fraction]], pivots: list[int]) -> list[Fraction]:
    out = [Fraction(x) for x in vector]
    for row, p in zip(basis_rref, pivots):
        if out[p] != 0:
            factor = out[p]
            out = [x - factor * y for x, y in zip(out, row)]
    return out


def _sorted_unique(items: Iterable[tuple]) -> tuple:
    return tuple(sorted(set(items)))


def _canonical_h(
    inequalities: Iterable[Sequence[Number]], equations: Iterable[Sequence[Number]]
) -> HDescription:
    eq_rref, eq_pivots = row_echelon([list(e) for e in equations])
    eqs = [primitive(row) for row in eq_rref]
    ineqs = []
    for row in inequalities:
        reduced = primitive(_reduce_modulo(row, eq_rref, eq_pivots))
        if any(reduced[1:]):
            ineqs.append(reduced)
    return HDescription(inequalities=_sorted_unique(ineqs), equations=tuple(sorted(eqs)))


def _canonical_v(
    vertices: Iterable[Sequence[Number]], rays: Iterable[Sequence[Number]], lineality: Iterable[Sequence[Number]], n: int
) -> VDescription:
    lin = lattice_basis_of_span([list(l) for l in lineality], n)
    lin_rref, lin_pivots = row_echelon(lin)
    canon_rays = []
    for r in rays:
        reduced = _reduce_modulo(r, lin_rref, lin_pivots)
        if any(reduced):
            canon_rays.append(primitive(reduced))
    canon_vertices = [tuple(_reduce_modulo(v, lin_rref, lin_pivots)) for v in vertices]
    return VDescription(
        vertices=_sorted_unique(canon_vertices),
        rays=_sorted_unique(canon_rays),
        lineality=tuple(sorted(lin)),
    )


def h_to_v(h: HDescription, n: int) -> VDescription:
    """Convert an H-description of a polyhedron in R^n to its V-description."""
    # 1 >= 0 keeps the matrix nonempty for the whole space
    trivial = (1,) + (0,) * n
    mat = _cdd_matrix(list(h.inequalities) + [trivial], h.equations, cdd.RepType.INEQUALITY)
    points, lines = _split_rows(cdd.Polyhedron(mat).get_generators())
    vertices = [tuple(x / r[0] for x in r[1:]) for r in points if r[0] != 0]
    if not vertices:
        raise EmptyPolyhedron("H-description is infeasible")
    recession = [r[1:] for r in points if r[0] == 0]
    return _canonical_v(vertices, recession, [l[1:] for l in lines], n)


def v_to_h(v: VDescription, n: int) -> HDescription:
    """Convert a V-description of a polyhedron in R^n to its irredundant H-description."""
    if not v.vertices:
        raise EmptyPolyhedron("V-description needs at least one vertex")
    generators = [_homog_point(p) for p in v.vertices] + [(0,) + tuple(r) for r in v.rays]
    lin = [(0,) + tuple(l) for l in v.lineality]
    mat = _cdd_matrix(generators, lin, cdd.RepType.GENERATOR)
    inequalities, equations = _split_rows(cdd.Polyhedron(mat).get_inequalities())
    points = generators[: len(v.vertices)]
    # rows tight on no vertex bound only the far face
    facets = [row for row in inequalities if any(dot(row, p) == 0 for p in points)]
    return _canonical_h(facets, equations)


def _homog_point(p: Sequence[Number]) -> tuple[Fraction, ...]:
    return (Fraction(1),) + tuple(Fraction(x) for x in p)


# --- the polyhedron type -----------------------------------------------------------


@dataclass(frozen=True)
class Polyhedron:
    """A rational polyhedron; both descriptions are canonical, so ``==`` is set equality."""

    ambient_dim: int
    h: HDescription
    v: VDescription

    @classmethod
    def from_v(
        cls,
        vertices: Iterable[Sequence[Number]],
        rays: Iterable[Sequence[Number]] = (),
        lineality: Iterable[Sequence[Number]] = (),
        ambient_dim: int | None = None,
    ) -> "Polyhedron":
        vertices = [tuple(Fraction(x) for x in p) for p in vertices]
        rays = [tuple(r) for r in rays]
        lineality = [tuple(l) for l in lineality]
        n = ambient_dim if ambient_dim is not None else _infer_dim(vertices, rays, lineality)
        raw = VDescription(
            vertices=tuple(vertices),
            rays=tuple(primitive(r) for r in rays if any(r)),
            lineality=tuple(primitive(l) for l in lineality if any(l)),
        )
        h = v_to_h(raw, n)
        return cls(ambient_dim=n, h=h, v=h_to_v(h, n))

    @classmethod
    def from_h(
        cls,
        inequalities: Iterable[tuple[Sequence[Number], Number]] = (),
        equations: Iterable[tuple[Sequence[Number], Number]] = (),
        ambient_dim: int | None = None,
    ) -> "Polyhedron":
        """Build from ``(normal, offset)`` pairs meaning ``<x, normal> >= offset`` (``=`` for equations)."""
        ineq_rows = [_homog_row(a, b) for a, b in inequalities]
        eq_rows = [_homog_row(a, b) for a, b in equations]
        rows = ineq_rows + eq_rows
        if ambient_dim is None:
            if not rows:
                raise ValueError("ambient_dim is required without constraints")
            ambient_dim = len(rows[0]) - 1
        return cls.from_h_rows(ineq_rows, eq_rows, ambient_dim)

    @classmethod
    def from_h_rows(
        cls,
        inequalities: Iterable[Sequence[Number]],
        equations: Iterable[Sequence[Number]],
        ambient_dim: int,
    ) -> "Polyhedron":
        """Build from homogeneous rows; infeasible systems give the empty polyhedron."""
        raw = HDescription(
            inequalities=tuple(primitive(r) for r in inequalities),
            equations=tuple(primitive(r) for r in equations),
        )
        try:
            v = h_to_v(raw, ambient_dim)
        except EmptyPolyhedron:
            return cls.empty(ambient_dim)
        return cls(ambient_dim=ambient_dim, h=v_to_h(v, ambient_dim), v=v)

    @classmethod
    def cone(cls, rays: Iterable[Sequence[Number]], lineality: Iterable[Sequence[Number]] = (), ambient_dim: int | None = None) -> "Polyhedron":
        rays = [tuple(r) for r in rays]
        lineality = [tuple(l) for l in lineality]
        n = ambient_dim if ambient_dim is not None else _infer_dim([], rays, lineality)
        return cls.from_v([(0,) * n], rays, lineality, ambient_dim=n)

    @classmethod
    def point(cls, p: Sequence[Number]) -> "Polyhedron":
        return cls.from_v([p], ambient_dim=len(p))

    @classmethod
    def whole_space(cls, n: int) -> "Polyhedron":
        units = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
        return cls.from_v([(0,) * n], lineality=units, ambient_dim=n)

    @classmethod
    def empty(cls, n: int) -> "Polyhedron":
        return cls(ambient_dim=n, h=HDescription(inequalities=((-1,) + (0,) * n,)), v=VDescription())

    # -- cached invariants --

    @property
    def is_empty(self) -> bool:
        return not self.v.vertices

    @property
    def is_bounded(self) -> bool:
        return not self.v.rays and not self.v.lineality

    @property
    def is_cone(self) -> bool:
        return self.v.vertices == ((Fraction(0),) * self.ambient_dim,)

    @cached_property
    def dim(self) -> int:
        if self.is_empty:
            return -1
        return rank(self._homog_generators() + [(0,) + l for l in self.v.lineality]) - 1

    @cached_property
    def span_basis(self) -> list[IntVector]:
        """Lattice basis of Λ_σ = V_σ ∩ Z^n."""
        return lattice_basis_of_span(self.direction_vectors(), self.ambient_dim)

    @cached_property
    def _face_index_sets(self) -> dict[frozenset[int], int]:
        """All nonempty faces as sets of generator indices, mapped to their dimension."""
        if self.is_empty:
            return {}
        gens = self._homog_generators()
        nv = len(self.v.vertices)
        tight_sets = [
            frozenset(i for i, g in enumerate(gens) if dot(row, g) == 0) for row in self.h.inequalities
        ]
        full = frozenset(range(len(gens)))
        faces = {full: self.dim}
        queue = [full]
        while queue:
            face = queue.pop()
            for t in tight_sets:
                if face <= t:
                    continue
                sub = face & t
                if sub in faces or not any(i < nv for i in sub):
                    continue
                faces[sub] = self._rank_of(sub) - 1
                queue.append(sub)
        return faces

    def _rank_of(self, indices: Iterable[int]) -> int:
        gens = self._homog_generators()
        return rank([gens[i] for i in indices] + [(0,) + l for l in self.v.lineality])

    def _homog_generators(self) -> list[tuple[Fraction, ...]]:
        return [_homog_point(p) for p in self.v.vertices] + [
            (Fraction(0),) + tuple(Fraction(x) for x in r) for r in self.v.rays
        ]

    def direction_vectors(self) -> list[tuple[Fraction, ...]]:
        """Vectors spanning V_σ: vertex differences, rays and lineality."""
        if self.is_empty:
            return []
        base = self.v.vertices[0]
        vectors = [tuple(a - b for a, b in zip(p, base)) for p in self.v.vertices[1:]]
        vectors += [tuple(Fraction(x) for x in r) for r in self.v.rays]
        vectors += [tuple(Fraction(x) for x in l) for l in self.v.lineality]
        return vectors

    def equation_rows(self) -> list[IntVector]:
        """Integral rows whose common kernel is V_σ."""
        return kernel_lattice_basis(self.span_basis, ncols=self.ambient_dim) if self.span_basis else [
            tuple(1 if i == j else 0 for j in range(self.ambient_dim)) for i in range(self.ambient_dim)
        ]

    # -- predicates --

    def contains(self, x: Sequence[Number]) -> bool:
        if self.is_empty:
            return False
        hx = _homog_point(x)
        return all(dot(row, hx) >= 0 for row in self.h.inequalities) and all(
            dot(row, hx) == 0 for row in self.h.equations
        )

    def in_relative_interior(self, x: Sequence[Number]) -> bool:
        if self.is_empty:
            return False
        hx = _homog_point(x)
        return all(dot(row, hx) > 0 for row in self.h.inequalities) and all(
            dot(row, hx) == 0 for row in self.h.equations
        )

    def contains_polyhedron(self, other: "Polyhedron") -> bool:
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        for row in self.h.inequalities:
            if any(dot(row, g) < 0 for g in other._homog_generators()):
                return False
            if any(dot(row, (0,) + l) != 0 for l in other.v.lineality):
                return False
        for row in self.h.equations:
            if any(dot(row, g) != 0 for g in other._homog_generators()):
                return False
            if any(dot(row, (0,) + l) != 0 for l in other.v.lineality):
                return False
        return True

    def is_face_of(self, other: "Polyhedron") -> bool:
        return other.contains_polyhedron(self) and self in faces(other, self.dim)

    def sort_key(self) -> tuple:
        return (self.dim, self.v.vertices, self.v.rays, self.v.lineality)

    def __repr__(self) -> str:
        return (
            f"Polyhedron(dim={self.dim}, vertices={[tuple(map(str, p)) for p in self.v.vertices]}, "
            f"rays={list(self.v.rays)}, lineality={list(self.v.lineality)})"
        )


def _infer_dim(*collections: Sequence[Sequence[Number]]) -> int:
    for col in collections:
        if col:
            return len(col[0])
    raise ValueError("ambient_dim is required for an empty generator list")


def _homog_row(normal: Sequence[Number], offset: Number) -> tuple[Fraction, ...]:
    return (-Fraction(offset),) + tuple(Fraction(x) for x in normal)


def _check_ambient(a: Polyhedron, b: Polyhedron) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"Ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


# --- operations ---------------------------------------------------------------------


def intersect_polyhedra(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    _check_ambient(a, b)
    if a.is_empty or b.is_empty:
        return Polyhedron.empty(a.ambient_dim)
    return Polyhedron.from_h_rows(
        a.h.inequalities + b.h.inequalities, a.h.equations + b.h.equations, a.ambient_dim
    )


def faces(p: Polyhedron, k: int) -> list[Polyhedron]:
    """All k-dimensional faces of ``p``, canonical and sorted."""
    if p.is_empty or k < 0 or k > p.dim:
        return []
    if k == p.dim:
        return [p]
    result = [_face_from_indices(p, idx) for idx, dim in p._face_index_sets.items() if dim == k]
    return sorted(result, key=Polyhedron.sort_key)


def _face_from_indices(p: Polyhedron, indices: frozenset[int]) -> Polyhedron:
    gens = p._homog_generators()
    nv = len(p.v.vertices)
    vertices = [p.v.vertices[i] for i in sorted(indices) if i < nv]
    rays = [p.v.rays[i - nv] for i in sorted(indices) if i >= nv]
    face_rank = p._rank_of(indices)
    equations = list(p.h.equations)
    candidates = []
    for row in p.h.inequalities:
        sub = frozenset(i for i in indices if dot(row, gens[i]) == 0)
        if sub == indices:
            equations.append(row)
        elif p._rank_of(sub) == face_rank - 1 and any(i < nv for i in sub):
            candidates.append(row)
    h = _canonical_h(candidates, equations)
    v = _canonical_v(vertices, rays, p.v.lineality, p.ambient_dim)
    return Polyhedron(ambient_dim=p.ambient_dim, h=h, v=v)


def facets(p: Polyhedron) -> list[Polyhedron]:
    return faces(p, p.dim - 1)


def all_faces(p: Polyhedron) -> list[Polyhedron]:
    result = [_face_from_indices(p, idx) if dim < p.dim else p for idx, dim in p._face_index_sets.items()]
    return sorted(result, key=Polyhedron.sort_key)


def normal_fan(polytope: Polyhedron) -> list[Polyhedron]:
    """Maximal cones of the normal fan: the cone of a vertex holds the linear forms maximized there."""
    if polytope.is_empty or not polytope.is_bounded:
        raise ValueError("normal_fan needs a nonempty bounded polytope")
    n = polytope.ambient_dim
    cones = []
    for v in polytope.v.vertices:
        rows = [(0,) + tuple(a - b for a, b in zip(v, u)) for u in polytope.v.vertices if u != v]
        cones.append(Polyhedron.from_h_rows(rows, [], n))
    return sorted(cones, key=Polyhedron.sort_key)


def minkowski_sum_cones(a: Polyhedron, b: Polyhedron, negate_second: bool = False) -> Polyhedron:
    """Cone generated by the generators of ``a`` and those of ``b`` (or ``-b``)."""
    _check_ambient(a, b)
    if not (a.is_cone and b.is_cone):
        raise ValueError("minkowski_sum_cones expects two cones")
    sign = -1 if negate_second else 1
    rays = list(a.v.rays) + [tuple(sign * x for x in r) for r in b.v.rays]
    return Polyhedron.cone(rays, list(a.v.lineality) + list(b.v.lineality), ambient_dim=a.ambient_dim)


def relative_interior_point(p: Polyhedron) -> tuple[Fraction, ...]:
    """Vertex barycenter plus the sum of the canonical rays."""
    if p.is_empty:
        raise EmptyPolyhedron("Empty polyhedron has no interior point")
    n = p.ambient_dim
    count = len(p.v.vertices)
    point = [sum((v[i] for v in p.v.vertices), Fraction(0)) / count for i in range(n)]
    for r in p.v.rays:
        point = [x + y for x, y in zip(point, r)]
    return tuple(point)


def skeleton(cells: Iterable[Polyhedron], k: int) -> list[Polyhedron]:
    found: set[Polyhedron] = set()
    for cell in cells:
        found.update(faces(cell, k))
    return sorted(found, key=Polyhedron.sort_key)


def product(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    """Cartesian product ``a × b`` in R^(n+m)."""
    n, m = a.ambient_dim, b.ambient_dim
    if a.is_empty or b.is_empty:
        return Polyhedron.empty(n + m)
    vertices = [tuple(p) + tuple(q) for p, q in itertools.product(a.v.vertices, b.v.vertices)]
    zeros_n, zeros_m = (0,) * n, (0,) * m
    rays = [tuple(r) + zeros_m for r in a.v.rays] + [zeros_n + tuple(r) for r in b.v.rays]
    lin = [tuple(l) + zeros_m for l in a.v.lineality] + [zeros_n + tuple(l) for l in b.v.lineality]
    ineqs = [(row[0],) + row[1:] + zeros_m for row in a.h.inequalities] + [
        (row[0],) + zeros_n + row[1:] for row in b.h.inequalities
    ]
    eqs = [(row[0],) + row[1:] + zeros_m for row in a.h.equations] + [
        (row[0],) + zeros_n + row[1:] for row in b.h.equations
    ]
    return Polyhedron(
        ambient_dim=n + m,
        h=_canonical_h(ineqs, eqs),
        v=_canonical_v(vertices, rays, lin, n + m),
    )


def affine_image(
    p: Polyhedron, matrix: Sequence[Sequence[Number]], translation: Sequence[Number] | None = None
) -> Polyhedron:
    """Image of ``p`` under ``x ↦ matrix·x + translation``."""
    m = len(matrix)
    shift = [Fraction(t) for t in translation] if translation is not None else [Fraction(0)] * m
    if p.is_empty:
        return Polyhedron.empty(m)

    def apply(x: Sequence[Number]) -> list[Fraction]:
        return [dot(row, x) for row in matrix]

    vertices = [[a + b for a, b in zip(apply(v), shift)] for v in p.v.vertices]
    rays = [apply(r) for r in p.v.rays]
    lin = [apply(l) for l in p.v.lineality]
    return Polyhedron.from_v(vertices, rays, lin, ambient_dim=m)


def polytope_from_points(points: Iterable[Sequence[Number]]) -> Polyhedron:
    return Polyhedron.from_v(list(points))

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import AmbientMismatch, NotAFace, SupportNotContained
from .exact_arith import (
    IntVector,
    RatVector,
    dot,
    hnf,
    in_span,
    index_in_saturation,
    integral_vector,
    kernel_lattice_basis,
    nullspace,
    solve,
    transpose,
    unit_vectors,
)
from .polyhedra import (
    Polyhedron,
    affine_image,
    all_faces,
    faces,
    facets,
    intersect_polyhedra,
    product,
    relative_interior_point,
    skeleton,
)
from .utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolyhedralComplex:
    """Pure polyhedral complex given by its maximal cells in canonical order."""

    ambient_dim: int
    maximal_cells: tuple[Polyhedron, ...]
    local_cone: Polyhedron | None = None

    @cached_property
    def dim(self) -> int:
        if not self.maximal_cells:
            return -1
        return self.maximal_cells[0].dim

    @cached_property
    def codim_one_incidence(self) -> tuple[tuple[Polyhedron, tuple[int, ...]], ...]:
        """Codimension-one cells with the indices of the adjacent maximal cells."""
        adjacent: dict[Polyhedron, list[int]] = {}
        for index, cell in enumerate(self.maximal_cells):
            for facet in facets(cell):
                adjacent.setdefault(facet, []).append(index)
        ordered = sorted(adjacent.items(), key=lambda item: item[0].sort_key())
        return tuple((tau, tuple(indices)) for tau, indices in ordered)

    def codim_one_cells(self) -> list[Polyhedron]:
        return [tau for tau, _ in self.codim_one_incidence]

    def is_relevant(self, tau: Polyhedron) -> bool:
        """True unless the complex is local and ``tau`` does not contain the local cone."""
        return self.local_cone is None or tau.contains_polyhedron(self.local_cone)

    def f_vector(self) -> list[int]:
        found: set[Polyhedron] = set()
        for cell in self.maximal_cells:
            found.update(all_faces(cell))
        counts = [0] * (self.dim + 1)
        for face in found:
            counts[face.dim] += 1
        return counts


@dataclass(frozen=True)
class TropicalCycle:
    complex: PolyhedralComplex
    weights: tuple[int, ...]

    @classmethod
    def from_cells(
        cls,
        cells: Iterable[Polyhedron],
        weights: Iterable[int],
        ambient_dim: int | None = None,
        local_cone: Polyhedron | None = None,
    ) -> "TropicalCycle":
        """Build a cycle, merging repeated cells by adding their weights."""
        merged: dict[Polyhedron, int] = {}
        for cell, weight in zip(cells, weights):
            merged[cell] = merged.get(cell, 0) + int(weight)
        if ambient_dim is None:
            if not merged:
                raise ValueError("ambient_dim is required for an empty cycle")
            ambient_dim = next(iter(merged)).ambient_dim
        dims = {cell.dim for cell in merged}
        if len(dims) > 1:
            raise ValueError(f"Cells of a cycle must be pure-dimensional, got dimensions {sorted(dims)}")
        ordered = sorted(merged, key=Polyhedron.sort_key)
        return cls(
            complex=PolyhedralComplex(ambient_dim=ambient_dim, maximal_cells=tuple(ordered), local_cone=local_cone),
            weights=tuple(merged[c] for c in ordered),
        )

    @classmethod
    def from_fan(
        cls,
        rays: Sequence[Sequence[int | Fraction]],
        cones: Iterable[Iterable[int]],
        weights: Iterable[int] | None = None,
        lineality: Sequence[Sequence[int]] = (),
        ambient_dim: int | None = None,
    ) -> "TropicalCycle":
        cones = [list(c) for c in cones]
        n = ambient_dim if ambient_dim is not None else len(rays[0])
        cells = [Polyhedron.cone([rays[i] for i in cone], lineality, ambient_dim=n) for cone in cones]
        return cls.from_cells(cells, weights if weights is not None else [1] * len(cells), ambient_dim=n)

    @classmethod
    def whole_space(cls, n: int, weight: int = 1) -> "TropicalCycle":
        return cls.from_cells([Polyhedron.whole_space(n)], [weight], ambient_dim=n)

    @classmethod
    def empty(cls, n: int) -> "TropicalCycle":
        return cls.from_cells([], [], ambient_dim=n)

    @property
    def cells(self) -> tuple[Polyhedron, ...]:
        return self.complex.maximal_cells

    @property
    def ambient_dim(self) -> int:
        return self.complex.ambient_dim

    @property
    def dim(self) -> int:
        return self.complex.dim

    @property
    def local_cone(self) -> Polyhedron | None:
        return self.complex.local_cone

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def weight_of(self, cell: Polyhedron) -> int:
        return dict(zip(self.cells, self.weights)).get(cell, 0)

    def normalized(self) -> "TropicalCycle":
        """Drop cells of weight zero."""
        kept = [(c, w) for c, w in zip(self.cells, self.weights) if w != 0]
        return TropicalCycle.from_cells(
            [c for c, _ in kept], [w for _, w in kept], ambient_dim=self.ambient_dim, local_cone=self.local_cone
        )

    def with_local_cone(self, local_cone: Polyhedron | None) -> "TropicalCycle":
        return TropicalCycle.from_cells(self.cells, self.weights, ambient_dim=self.ambient_dim, local_cone=local_cone)

    def scaled(self, factor: int) -> "TropicalCycle":
        return TropicalCycle.from_cells(
            self.cells, [factor * w for w in self.weights], ambient_dim=self.ambient_dim, local_cone=self.local_cone
        )


@dataclass(frozen=True)
class LatticeNormal:
    tau: Polyhedron
    sigma: Polyhedron
    vector: IntVector


@dataclass
class BalanceReport:
    balanced: bool
    offending: list[Polyhedron] = field(default_factory=list)


@dataclass(frozen=True)
class WeightSpace:
    dimension: int
    basis: tuple[RatVector, ...]
    lattice_basis: tuple[IntVector, ...]


# --- lattice normals and balancing ------------------------------------------------------


def _coordinates(basis: Sequence[Sequence[int]], vector: Sequence[int | Fraction], n: int) -> RatVector:
    coords = solve(transpose(basis, n), vector)
    if coords is None:
        raise NotAFace("Vector does not lie in the span of the given basis")
    return coords


def primitive_normal(tau: Polyhedron, sigma: Polyhedron) -> IntVector:
    """Generator of Λ_σ/Λ_τ that is positive on σ.

    In coordinates of a lattice basis of Λ_σ the classes of Λ_τ span a saturated
    hyperplane with primitive normal form f; the last column of the HNF transform
    of f is a vector with f-value 1.
    """
    if sigma.dim != tau.dim + 1 or not sigma.contains_polyhedron(tau):
        raise NotAFace("tau is not a codimension-one face of sigma")
    n = sigma.ambient_dim
    basis = sigma.span_basis
    d = len(basis)
    tau_coords = [[int(x) for x in _coordinates(basis, t, n)] for t in tau.span_basis]
    form = kernel_lattice_basis(tau_coords, ncols=d)
    if len(form) != 1:
        raise NotAFace("tau does not span a hyperplane of sigma")
    f = form[0]
    transform = hnf([f]).transform
    u_coords = transform.column(d - 1)
    direction = [a - b for a, b in zip(relative_interior_point(sigma), relative_interior_point(tau))]
    if dot(f, _coordinates(basis, direction, n)) < 0:
        u_coords = tuple(-x for x in u_coords)
    return tuple(sum(c * b[i] for c, b in zip(u_coords, basis)) for i in range(n))


def lattice_normal(cycle: TropicalCycle, tau: Polyhedron, sigma: Polyhedron) -> LatticeNormal:
    if sigma not in cycle.cells:
        raise NotAFace("sigma is not a maximal cell of the cycle")
    return LatticeNormal(tau=tau, sigma=sigma, vector=primitive_normal(tau, sigma))


def balancing_sum(cycle: TropicalCycle, tau: Polyhedron, adjacent: Sequence[int]) -> tuple[int, ...]:
    total = [0] * cycle.ambient_dim
    for index in adjacent:
        u = primitive_normal(tau, cycle.cells[index])
        total = [t + cycle.weights[index] * x for t, x in zip(total, u)]
    return tuple(total)


def is_balanced_at(cycle: TropicalCycle, tau: Polyhedron, adjacent: Sequence[int]) -> bool:
    return in_span(balancing_sum(cycle, tau, adjacent), tau.span_basis)


def is_balanced(cycle: TropicalCycle, threads: int | None = None) -> BalanceReport:
    """Check the balancing condition at every (relevant) codimension-one cell."""
    cycle = cycle.normalized()
    if cycle.is_empty or cycle.dim == 0:
        return BalanceReport(balanced=cycle.is_empty or cycle.dim == 0)
    checks = [(tau, adj) for tau, adj in cycle.complex.codim_one_incidence if cycle.complex.is_relevant(tau)]
    results = parallel_map(lambda item: is_balanced_at(cycle, item[0], item[1]), checks, threads)
    offending = [tau for (tau, _), ok in zip(checks, results) if not ok]
    logger.debug("Balancing checked at %d cells, %d offending", len(checks), len(offending))
    return BalanceReport(balanced=not offending, offending=offending)


# --- local structure ------------------------------------------------------------------


def tangent_cone(sigma: Polyhedron, point: Sequence[int | Fraction]) -> Polyhedron:
    """The cone R_{>=0}(σ - p) for a point p of σ."""
    gens = [[a - b for a, b in zip(v, point)] for v in sigma.v.vertices]
    gens += [list(r) for r in sigma.v.rays]
    return Polyhedron.cone(gens, sigma.v.lineality, ambient_dim=sigma.ambient_dim)


def star_at_point(cycle: TropicalCycle, point: Sequence[int | Fraction]) -> TropicalCycle:
    cells, weights = [], []
    for cell, weight in zip(cycle.cells, cycle.weights):
        if cell.contains(point):
            cells.append(tangent_cone(cell, point))
            weights.append(weight)
    return TropicalCycle.from_cells(cells, weights, ambient_dim=cycle.ambient_dim)


def star(cycle: TropicalCycle, tau: Polyhedron) -> TropicalCycle:
    """Star fan around ``tau`` in ambient coordinates, with V_τ as lineality."""
    p = relative_interior_point(tau)
    cells, weights = [], []
    for cell, weight in zip(cycle.cells, cycle.weights):
        if not cell.contains_polyhedron(tau):
            continue
        cone = tangent_cone(cell, p)
        cells.append(Polyhedron.cone(cone.v.rays, list(cone.v.lineality) + tau.span_basis, ambient_dim=cycle.ambient_dim))
        weights.append(weight)
    return TropicalCycle.from_cells(cells, weights, ambient_dim=cycle.ambient_dim)


def local_restriction(cycle: TropicalCycle, tau: Polyhedron) -> TropicalCycle:
    """Cells containing ``tau``, marked as local at ``tau``."""
    kept = [(c, w) for c, w in zip(cycle.cells, cycle.weights) if c.contains_polyhedron(tau)]
    return TropicalCycle.from_cells(
        [c for c, _ in kept], [w for _, w in kept], ambient_dim=cycle.ambient_dim, local_cone=tau
    )


# --- products and refinements ------------------------------------------------------------


def cartesian_product(x: TropicalCycle, y: TropicalCycle) -> TropicalCycle:
    cells, weights = [], []
    for a, wa in zip(x.cells, x.weights):
        for b, wb in zip(y.cells, y.weights):
            cells.append(product(a, b))
            weights.append(wa * wb)
    return TropicalCycle.from_cells(cells, weights, ambient_dim=x.ambient_dim + y.ambient_dim)


def _check_ambient(x: int, y: int) -> None:
    if x != y:
        raise AmbientMismatch(f"Ambient dimensions differ: {x} vs {y}")


def _pieces(cell: Polyhedron, others: Sequence[Polyhedron], dim: int) -> list[tuple[int, Polyhedron]]:
    pieces = []
    for j, other in enumerate(others):
        meet = intersect_polyhedra(cell, other)
        if meet.dim == dim:
            pieces.append((j, meet))
    return pieces


def _covers(cell: Polyhedron, pieces: Sequence[Polyhedron]) -> bool:
    """True if the full-dimensional ``pieces`` of ``cell`` tile it."""
    if not pieces:
        return False
    if cell.dim == 0:
        return True
    piece_facets = [set(facets(p)) for p in pieces]
    for i, own in enumerate(piece_facets):
        for facet in own:
            if not cell.in_relative_interior(relative_interior_point(facet)):
                continue
            if not any(facet in other for j, other in enumerate(piece_facets) if j != i):
                return False
    return True


def common_refinement(x: PolyhedralComplex, y: PolyhedralComplex) -> PolyhedralComplex:
    """Intersections σ∩σ' of the dimension of ``x``."""
    _check_ambient(x.ambient_dim, y.ambient_dim)
    cells: set[Polyhedron] = set()
    for cell in x.maximal_cells:
        cells.update(piece for _, piece in _pieces(cell, y.maximal_cells, x.dim))
    return PolyhedralComplex(
        ambient_dim=x.ambient_dim,
        maximal_cells=tuple(sorted(cells, key=Polyhedron.sort_key)),
        local_cone=x.local_cone,
    )


def refine_cycle(cycle: TropicalCycle, cells: Sequence[Polyhedron], threads: int | None = None) -> TropicalCycle:
    """Refine ``cycle`` by the cells of another complex whose support contains it."""
    _check_ambient(cycle.ambient_dim, cells[0].ambient_dim if cells else cycle.ambient_dim)

    def refine_one(item: tuple[Polyhedron, int]) -> list[tuple[Polyhedron, int]]:
        cell, weight = item
        pieces = [piece for _, piece in _pieces(cell, cells, cycle.dim)]
        if not _covers(cell, pieces):
            raise SupportNotContained("Cycle support is not contained in the refining complex")
        return [(piece, weight) for piece in pieces]

    refined = [pair for chunk in parallel_map(refine_one, list(zip(cycle.cells, cycle.weights)), threads) for pair in chunk]
    logger.debug("Refined %d cells into %d", len(cycle.cells), len(refined))
    return TropicalCycle.from_cells(
        [c for c, _ in refined], [w for _, w in refined], ambient_dim=cycle.ambient_dim, local_cone=cycle.local_cone
    )


def _split(cell: Polyhedron, rows: Sequence[Sequence[int]]) -> list[Polyhedron]:
    pieces = [cell]
    for row in rows:
        next_pieces = []
        for piece in pieces:
            halves = [
                intersect_polyhedra(piece, Polyhedron.from_h_rows([row], [], piece.ambient_dim)),
                intersect_polyhedra(piece, Polyhedron.from_h_rows([tuple(-x for x in row)], [], piece.ambient_dim)),
            ]
            full = [h for h in halves if h.dim == piece.dim]
            next_pieces.extend(full if len(full) == 2 and piece not in full else [piece])
        pieces = next_pieces
    return pieces


def refine_overlaps(cells: Sequence[Polyhedron], weights: Sequence[int], n: int) -> TropicalCycle:
    """Cycle from cells that may overlap: cells sharing an affine hull are cut along
    each other's facet hyperplanes and equal pieces add up their weights."""
    groups: dict[tuple, list[int]] = {}
    for i, cell in enumerate(cells):
        groups.setdefault(cell.h.equations, []).append(i)
    out_cells, out_weights = [], []
    for members in groups.values():
        rows = sorted({row for i in members for row in cells[i].h.inequalities})
        for i in members:
            for piece in _split(cells[i], rows):
                out_cells.append(piece)
                out_weights.append(weights[i])
    return TropicalCycle.from_cells(out_cells, out_weights, ambient_dim=n).normalized()


def cycles_equal(x: TropicalCycle, y: TropicalCycle) -> bool:
    """Equal supports with equal weights on a common refinement."""
    x, y = x.normalized(), y.normalized()
    if x.ambient_dim != y.ambient_dim:
        return False
    if x.is_empty or y.is_empty:
        return x.is_empty and y.is_empty
    if x.dim != y.dim:
        return False
    pieces_of_y: dict[int, list[Polyhedron]] = {}
    for i, (cell, weight) in enumerate(zip(x.cells, x.weights)):
        pieces = _pieces(cell, y.cells, x.dim)
        if not _covers(cell, [p for _, p in pieces]):
            return False
        for j, piece in pieces:
            if y.weights[j] != weight:
                return False
            pieces_of_y.setdefault(j, []).append(piece)
    return all(_covers(cell, pieces_of_y.get(j, [])) for j, cell in enumerate(y.cells))


def k_skeleton(cycle: TropicalCycle, k: int) -> PolyhedralComplex:
    return PolyhedralComplex(
        ambient_dim=cycle.ambient_dim,
        maximal_cells=tuple(skeleton(cycle.cells, k)),
        local_cone=cycle.local_cone,
    )


# --- weight space and irreducibility ----------------------------------------------------


def _local_weight_equations(cycle: TropicalCycle, tau: Polyhedron, adjacent: Sequence[int]) -> list[list[int]]:
    """Equations on R^N cutting out the weights balanced at ``tau``.

    The matrix M_τ has the lattice normals of the adjacent cells followed by a
    lattice basis of Λ_τ as columns; its integer kernel projected to the first
    k coordinates is the local weight lattice.
    """
    n = cycle.ambient_dim
    normals = [primitive_normal(tau, cycle.cells[i]) for i in adjacent]
    columns = normals + list(tau.span_basis)
    m_tau = [[col[r] for col in columns] for r in range(n)]
    kernel = kernel_lattice_basis(m_tau, ncols=len(columns))
    k = len(adjacent)
    local = [vec[:k] for vec in kernel if any(vec[:k])]
    local_equations = kernel_lattice_basis(local, ncols=k) if local else unit_vectors(k)
    rows = []
    for eq in local_equations:
        row = [0] * len(cycle.cells)
        for coefficient, index in zip(eq, adjacent):
            row[index] = coefficient
        rows.append(row)
    return rows


def weight_equations(cycle: TropicalCycle, threads: int | None = None) -> list[list[int]]:
    checks = [(tau, adj) for tau, adj in cycle.complex.codim_one_incidence if cycle.complex.is_relevant(tau)]
    chunks = parallel_map(lambda item: _local_weight_equations(cycle, item[0], item[1]), checks, threads)
    return [row for chunk in chunks for row in chunk]


def weight_space(cycle: TropicalCycle, threads: int | None = None) -> WeightSpace:
    """Space of weight vectors on the maximal cells that make the complex balanced."""
    count = len(cycle.cells)
    rows = weight_equations(cycle, threads) if cycle.dim > 0 else []
    if rows:
        basis = nullspace(rows, count)
        lattice = kernel_lattice_basis(rows, ncols=count)
    else:
        basis = [tuple(Fraction(x) for x in u) for u in unit_vectors(count)]
        lattice = unit_vectors(count)
    return WeightSpace(dimension=len(basis), basis=tuple(basis), lattice_basis=tuple(lattice))


def is_irreducible(cycle: TropicalCycle, threads: int | None = None) -> bool:
    cycle = cycle.normalized()
    if cycle.is_empty:
        return False
    g = 0
    for w in cycle.weights:
        g = math.gcd(g, w)
    return g == 1 and weight_space(cycle, threads).dimension == 1


def weight_cone(cycle: TropicalCycle, threads: int | None = None) -> Polyhedron:
    """V_X intersected with the positive orthant of R^N."""
    count = len(cycle.cells)
    rows = weight_equations(cycle, threads) if cycle.dim > 0 else []
    equations = [(0,) + tuple(row) for row in rows]
    positivity = [(0,) + u for u in unit_vectors(count)]
    return Polyhedron.from_h_rows(positivity, equations, count)


# --- transformations and reporting ------------------------------------------------------


def affine_transform(
    cycle: TropicalCycle, matrix: Sequence[Sequence[int]], translation: Sequence[int | Fraction] | None = None
) -> TropicalCycle:
    """Image under x ↦ Ax + b; weights scale by the lattice index of A on each cell."""
    m = len(matrix)
    cells, weights = [], []
    for cell, weight in zip(cycle.cells, cycle.weights):
        image = affine_image(cell, matrix, translation)
        if image.dim != cell.dim:
            raise ValueError("Affine map is not injective on a maximal cell")
        mapped = [integral_vector([dot(row, b) for row in matrix]) for b in cell.span_basis]
        cells.append(image)
        weights.append(weight * index_in_saturation(mapped, m))
    return TropicalCycle.from_cells(cells, weights, ambient_dim=m)


def summary(cycle: TropicalCycle) -> dict:
    return {
        "ambient_dim": cycle.ambient_dim,
        "dim": cycle.dim,
        "maximal_cells": len(cycle.cells),
        "f_vector": cycle.complex.f_vector() if not cycle.is_empty else [],
        "weights": list(cycle.weights),
        "balanced": is_balanced(cycle).balanced,
        "local": cycle.local_cone is not None,
    }

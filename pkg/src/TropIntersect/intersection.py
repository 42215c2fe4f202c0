"""Intersection products of tropical cycles in R^n."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cycles import TropicalCycle, cartesian_product, refine_overlaps, tangent_cone
from .errors import AmbientMismatch
from .exact_arith import dot, index_in_saturation, lattice_index, unit_vectors
from .functions import MAX, TropicalPolynomial, divisor
from .polyhedra import (
    Polyhedron,
    affine_image,
    intersect_polyhedra,
    minkowski_sum_cones,
    relative_interior_point,
    skeleton,
)
from .utils import parallel_map

logger = logging.getLogger(__name__)

MAX_DISPLACEMENT_TRIES = 10_000


@dataclass(frozen=True)
class ContributingPair:
    rho1: Polyhedron
    rho2: Polyhedron
    index: int
    term: int


@dataclass
class IntersectionWitness:
    cell: Polyhedron
    point: tuple[Fraction, ...]
    displacement: tuple[int, ...]
    pairs: list[ContributingPair] = field(default_factory=list)

    @property
    def weight(self) -> int:
        return sum(pair.term for pair in self.pairs)


def _check_ambient(x: TropicalCycle, y: TropicalCycle) -> None:
    if x.ambient_dim != y.ambient_dim:
        raise AmbientMismatch(f"Ambient dimensions differ: {x.ambient_dim} vs {y.ambient_dim}")


def _is_whole_space(cycle: TropicalCycle) -> bool:
    return len(cycle.cells) == 1 and cycle.cells[0].dim == cycle.ambient_dim and cycle.cells[0].is_cone


def _local_fan(cycle: TropicalCycle, point: Sequence[Fraction]) -> list[tuple[Polyhedron, int]]:
    return [(tangent_cone(cell, point), w) for cell, w in zip(cycle.cells, cycle.weights) if cell.contains(point)]


def _displacement_candidates(n: int):
    # points on the moment curve; a hyperplane meets it at most n - 1 times
    for t in range(2, MAX_DISPLACEMENT_TRIES):
        yield tuple(t**i for i in range(n))


def _generic_displacement(cones: Sequence[Polyhedron], n: int) -> tuple[int, ...]:
    """First candidate vector that avoids every facet hyperplane of the given cones."""
    rows = [row[1:] for cone in cones for row in cone.h.inequalities]
    for candidate in _displacement_candidates(n):
        if all(dot(row, candidate) != 0 for row in rows):
            return candidate
    raise RuntimeError("No generic displacement vector found")


def intersection_witness(
    x: TropicalCycle, y: TropicalCycle, cell: Polyhedron
) -> IntersectionWitness:
    """Weight of ``cell`` in X·Y from the local fans at a relative interior point."""
    n = x.ambient_dim
    point = relative_interior_point(cell)
    star_x = _local_fan(x, point)
    star_y = _local_fan(y, point)
    differences = []
    for rho1, w1 in star_x:
        for rho2, w2 in star_y:
            if rho1.dim + rho2.dim < n:
                continue
            diff = minkowski_sum_cones(rho1, rho2, negate_second=True)
            if diff.dim == n:
                differences.append((rho1, w1, rho2, w2, diff))
    witness = IntersectionWitness(cell=cell, point=point, displacement=())
    if not differences:
        return witness
    v = _generic_displacement([d for *_, d in differences], n)
    witness.displacement = v
    for rho1, w1, rho2, w2, diff in differences:
        if not diff.in_relative_interior(v):
            continue
        generators = list(rho1.span_basis) + list(rho2.span_basis)
        index = lattice_index(generators, unit_vectors(n), n)
        witness.pairs.append(ContributingPair(rho1=rho1, rho2=rho2, index=index, term=w1 * w2 * index))
    return witness


def stable_intersect_with_witnesses(
    x: TropicalCycle, y: TropicalCycle, threads: int | None = None
) -> tuple[TropicalCycle, list[IntersectionWitness]]:
    _check_ambient(x, y)
    n = x.ambient_dim
    x, y = x.normalized(), y.normalized()
    if x.is_empty or y.is_empty:
        return TropicalCycle.empty(n), []
    target = x.dim + y.dim - n
    if target < 0:
        return TropicalCycle.empty(n), []
    if _is_whole_space(x):
        return y.scaled(x.weights[0]), []
    if _is_whole_space(y):
        return x.scaled(y.weights[0]), []

    meets: set[Polyhedron] = set()
    for a in x.cells:
        for b in y.cells:
            meet = intersect_polyhedra(a, b)
            if meet.dim >= target:
                meets.add(meet)
    candidates = skeleton(meets, target)
    logger.debug("Stable intersection: %d candidate cells of dimension %d", len(candidates), target)
    witnesses = parallel_map(lambda cell: intersection_witness(x, y, cell), candidates, threads)
    kept = [w for w in witnesses if w.weight != 0]
    result = TropicalCycle.from_cells([w.cell for w in kept], [w.weight for w in kept], ambient_dim=n)
    return result, kept


def stable_intersect(x: TropicalCycle, y: TropicalCycle, threads: int | None = None) -> TropicalCycle:
    """Intersection product by the local Minkowski-difference criterion with lattice-index weights."""
    return stable_intersect_with_witnesses(x, y, threads)[0]


def diagonal_functions(n: int) -> list[TropicalPolynomial]:
    """ψ_i = max{x_i, y_i} on R^n × R^n."""
    functions = []
    for i in range(n):
        a = tuple(1 if j == i else 0 for j in range(2 * n))
        b = tuple(1 if j == n + i else 0 for j in range(2 * n))
        functions.append(TropicalPolynomial(MAX, ((a, Fraction(0)), (b, Fraction(0)))))
    return functions


def pushforward_forget_coordinates(cycle: TropicalCycle, n: int | None = None) -> TropicalCycle:
    """Project to the first n coordinates, weighting by the lattice index of the projection."""
    if n is None:
        if cycle.ambient_dim % 2:
            raise ValueError("n is required when the ambient dimension is odd")
        n = cycle.ambient_dim // 2
    projection = [[1 if j == i else 0 for j in range(cycle.ambient_dim)] for i in range(n)]
    cells, weights = [], []
    for cell, weight in zip(cycle.cells, cycle.weights):
        image = affine_image(cell, projection)
        if image.dim != cell.dim:
            continue
        projected = [tuple(b[:n]) for b in cell.span_basis]
        cells.append(image)
        weights.append(weight * index_in_saturation(projected, n))
    return refine_overlaps(cells, weights, n)


def diagonal_intersect(x: TropicalCycle, y: TropicalCycle, threads: int | None = None) -> TropicalCycle:
    """X·Y = π_*(ψ_1 ⋯ ψ_n · (X × Y))."""
    _check_ambient(x, y)
    n = x.ambient_dim
    x, y = x.normalized(), y.normalized()
    if x.is_empty or y.is_empty or x.dim + y.dim < n:
        return TropicalCycle.empty(n)
    current = cartesian_product(x, y)
    for psi in diagonal_functions(n):
        current = divisor(psi, current, threads)
        if current.is_empty:
            return TropicalCycle.empty(n)
    return pushforward_forget_coordinates(current, n)

"""Matroids given by bases, circuits, and their Bergman fans.

Sign convention: w lies in B(M) iff for every circuit C the minimum of w over C
is attained at least twice. Equivalently the matroid M_w of w-maximal bases has
no loops.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from .cycles import TropicalCycle
from .errors import InvalidMatroid, NotDependent
from .exact_arith import rank, solve
from .polyhedra import Polyhedron, normal_fan, relative_interior_point, skeleton
from .utils import parallel_map, verify_limit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matroid:
    n: int
    bases: frozenset[frozenset[int]]
    matrix: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self) -> None:
        if not self.bases:
            raise InvalidMatroid("A matroid needs at least one basis")
        sizes = {len(b) for b in self.bases}
        if len(sizes) != 1:
            raise InvalidMatroid("All bases must have the same cardinality")
        if any(not 0 <= e < self.n for b in self.bases for e in b):
            raise InvalidMatroid(f"Basis elements must lie in 0..{self.n - 1}")
        if self.n > verify_limit():
            logger.warning("Skipping basis-exchange verification for a matroid on %d elements", self.n)
        elif not self._exchange_holds():
            raise InvalidMatroid("Bases violate the basis-exchange axiom")

    @classmethod
    def from_bases(cls, n: int, bases: Iterable[Iterable[int]]) -> "Matroid":
        return cls(n=n, bases=frozenset(frozenset(b) for b in bases))

    def _exchange_holds(self) -> bool:
        for b1 in self.bases:
            for b2 in self.bases:
                for x in b1 - b2:
                    if not any((b1 - {x}) | {y} in self.bases for y in b2 - b1):
                        return False
        return True

    @cached_property
    def rank(self) -> int:
        return len(next(iter(self.bases)))

    @cached_property
    def sorted_bases(self) -> list[tuple[int, ...]]:
        return sorted(tuple(sorted(b)) for b in self.bases)

    def rank_of(self, subset: Iterable[int]) -> int:
        s = frozenset(subset)
        return max(len(b & s) for b in self.bases)

    def independent(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        return any(s <= b for b in self.bases)

    def closure(self, subset: Iterable[int]) -> frozenset[int]:
        s = frozenset(subset)
        r = self.rank_of(s)
        return frozenset(e for e in range(self.n) if self.rank_of(s | {e}) == r)

    @cached_property
    def loops(self) -> frozenset[int]:
        covered = frozenset().union(*self.bases)
        return frozenset(range(self.n)) - covered

    @property
    def is_loop_free(self) -> bool:
        return not self.loops


def uniform_matroid(r: int, n: int) -> Matroid:
    if not 0 <= r <= n:
        raise InvalidMatroid("Uniform matroid needs 0 <= r <= n")
    return Matroid.from_bases(n, itertools.combinations(range(n), r))


def matrix_matroid(rows: Sequence[Sequence[int | Fraction]]) -> Matroid:
    """Column matroid of a rational matrix."""
    matrix = tuple(tuple(Fraction(x) for x in row) for row in rows)
    n = len(matrix[0])
    r = rank(matrix)
    columns = [[row[j] for row in matrix] for j in range(n)]
    bases = [s for s in itertools.combinations(range(n), r) if rank([columns[j] for j in s]) == r]
    return Matroid(n=n, bases=frozenset(frozenset(b) for b in bases), matrix=matrix)


def complete_graph_edges(k: int) -> list[tuple[int, int]]:
    """Edges {a, b} of K_k on vertices 1..k in lexicographic order."""
    return list(itertools.combinations(range(1, k + 1), 2))


def _is_spanning_tree(edges: Sequence[tuple[int, int]], k: int) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(range(1, k + 1))
    graph.add_edges_from(edges)
    return nx.is_tree(graph)


def complete_graph_matroid(k: int) -> Matroid:
    """Graphic matroid of K_k; ground element i is the i-th edge in lexicographic order."""
    edges = complete_graph_edges(k)
    bases = [
        s for s in itertools.combinations(range(len(edges)), k - 1) if _is_spanning_tree([edges[i] for i in s], k)
    ]
    return Matroid.from_bases(len(edges), bases)


def circuits(m: Matroid) -> list[frozenset[int]]:
    """All minimal dependent sets, sorted by size then lexicographically."""
    found: list[frozenset[int]] = []
    for size in range(1, m.rank + 2):
        for subset in itertools.combinations(range(m.n), size):
            s = frozenset(subset)
            if m.independent(s):
                continue
            if any(c <= s for c in found):
                continue
            found.append(s)
    return found


def fundamental_circuit(m: Matroid, independent_set: Iterable[int], element: int) -> frozenset[int]:
    """C(e, I) = {e} ∪ {i ∈ I : (I \\ {i}) ∪ {e} independent}."""
    base = frozenset(independent_set)
    if not m.independent(base):
        raise InvalidMatroid("The given set is not independent")
    if element in base or m.independent(base | {element}):
        raise NotDependent(f"I ∪ {{{element}}} is independent")
    if m.matrix is not None:
        ordered = sorted(base)
        columns = [[row[j] for j in ordered] for row in m.matrix]
        target = [row[element] for row in m.matrix]
        coefficients = solve(columns, target)
        return frozenset({element} | {j for j, c in zip(ordered, coefficients) if c != 0})
    return frozenset({element} | {i for i in base if m.independent((base - {i}) | {element})})


def is_in_bergman_fan(m: Matroid, w: Sequence[int | Fraction], circuit_list: Sequence[frozenset[int]] | None = None) -> bool:
    for c in circuit_list if circuit_list is not None else circuits(m):
        values = [w[i] for i in c]
        low = min(values)
        if values.count(low) < 2:
            return False
    return True


def maximal_bases(m: Matroid, w: Sequence[int | Fraction]) -> list[tuple[int, ...]]:
    """Bases of M_w: those of maximal w-weight."""
    weights = {b: sum((Fraction(w[i]) for i in b), Fraction(0)) for b in m.sorted_bases}
    best = max(weights.values())
    return [b for b, value in weights.items() if value == best]


def mw_has_loops(m: Matroid, w: Sequence[int | Fraction]) -> bool:
    covered = set().union(*maximal_bases(m, w))
    return len(covered) < m.n


def matroid_polytope(m: Matroid) -> Polyhedron:
    points = [tuple(1 if i in b else 0 for i in range(m.n)) for b in m.sorted_bases]
    return Polyhedron.from_v(points, ambient_dim=m.n)


def _indicator(subset: Iterable[int], n: int) -> tuple[int, ...]:
    s = set(subset)
    return tuple(1 if i in s else 0 for i in range(n))


def _require_loop_free(m: Matroid) -> None:
    if not m.is_loop_free:
        raise InvalidMatroid(f"Matroid has loops {sorted(m.loops)}; its Bergman fan is empty")


def flag_of_flats(m: Matroid, basis: Sequence[int], order: Sequence[int]) -> tuple[frozenset[int], ...]:
    """Flats cl(π1..πk) for k < rank, closures taken through fundamental circuits of ``basis``."""
    b = frozenset(basis)
    outside = [e for e in range(m.n) if e not in b]
    circuits_of = {e: fundamental_circuit(m, b, e) - {e} for e in outside}
    flats = []
    prefix: set[int] = set()
    for element in order[:-1]:
        prefix.add(element)
        flats.append(frozenset(prefix | {e for e in outside if circuits_of[e] <= prefix}))
    return tuple(flats)


def bergman_fan_rincon(m: Matroid, threads: int | None = None) -> TropicalCycle:
    """Bergman fan from fundamental circuits of bases, with the matroid-polytope fan structure.

    Every basis B and ordering of B yields a chain of flats whose indicator
    vectors span a cone of the fine subdivision; cones whose interior points
    select the same set of maximal bases are merged into one cone.
    """
    _require_loop_free(m)
    n = m.n
    ones = (1,) * n

    def flags_for(basis: tuple[int, ...]) -> set[tuple[frozenset[int], ...]]:
        return {flag_of_flats(m, basis, order) for order in itertools.permutations(basis)}

    flags: set[tuple[frozenset[int], ...]] = set()
    for chunk in parallel_map(flags_for, m.sorted_bases, threads):
        flags.update(chunk)
    groups: dict[tuple, list[tuple[int, ...]]] = {}
    for flag in flags:
        rays = [_indicator(f, n) for f in flag]
        interior = [sum(col) for col in zip(*rays)] if rays else [0] * n
        label = tuple(maximal_bases(m, interior))
        groups.setdefault(label, []).extend(rays)
    cones = [Polyhedron.cone(rays, [ones], ambient_dim=n) for rays in groups.values()]
    cones = [c for c in cones if c.dim == m.rank]
    logger.debug("Rincon: %d flags merged into %d cones", len(flags), len(cones))
    return TropicalCycle.from_cells(cones, [1] * len(cones), ambient_dim=n)


def bergman_fan_normal(m: Matroid, threads: int | None = None) -> TropicalCycle:
    """Cones of the rank(M)-skeleton of the normal fan of P_M whose matroid M_w is loop-free."""
    _require_loop_free(m)
    fan = normal_fan(matroid_polytope(m))
    candidates = skeleton(fan, m.rank)
    keep = parallel_map(lambda cone: not mw_has_loops(m, relative_interior_point(cone)), candidates, threads)
    cones = [c for c, ok in zip(candidates, keep) if ok]
    logger.debug("Normal fan: %d of %d cones are loop-free", len(cones), len(candidates))
    return TropicalCycle.from_cells(cones, [1] * len(cones), ambient_dim=m.n)


def bergman_membership(fan: TropicalCycle, w: Sequence[int | Fraction]) -> bool:
    return any(cell.contains(w) for cell in fan.cells)


def cube_matroid_points(k: int) -> list[tuple[int, ...]]:
    """Vertices of the k-cube in homogeneous form (1, x); their column matroid is C_k."""
    return [(1,) + bits for bits in itertools.product((0, 1), repeat=k)]


def cube_matroid(k: int) -> Matroid:
    points = cube_matroid_points(k)
    return matrix_matroid([[p[i] for p in points] for i in range(k + 1)])


def tropical_linear_space(k: int, n: int) -> TropicalCycle:
    """L^n_k: the Bergman fan of U_{k+1,n+1} in the chart x_0 = 0.

    Rays are e_0 = (-1, ..., -1) and the unit vectors; every k of them span a cone.
    """
    if not 0 <= k <= n:
        raise InvalidMatroid("A tropical linear space needs 0 <= k <= n")
    rays = [(-1,) * n] + [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    cones = list(itertools.combinations(range(n + 1), k))
    return TropicalCycle.from_fan(rays, cones, ambient_dim=n)

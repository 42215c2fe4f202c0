"""Rational n-marked tropical curves and the moduli fan M0,n.

A curve is stored by its splits: each bounded edge separates the leaves into
I | I^c and we keep the side I that does not contain leaf n. Moduli points live
in R^{C(n-1,2)}, indexed by the edges of K_{n-1} in lexicographic order, modulo
the lineality space spanned by (1, ..., 1).
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .cycles import TropicalCycle
from .errors import DegreeTooLarge, InvalidCurve, NotATreeMetric, ParseError
from .exact_arith import IntVector
from .matroids import complete_graph_edges
from .polyhedra import Polyhedron
from .utils import parallel_map

logger = logging.getLogger(__name__)

_RE_TERM = re.compile(
    r"\s*\(\s*(?P<leaves>\d+(?:\s*,\s*\d+)*)\s*\)\s*(?::\s*(?P<length>\d+(?:/\d+)?))?\s*"
)
_RE_EMPTY = re.compile(r"\s*0?\s*")


# --- curves -------------------------------------------------------------------------------


def _leaf_side(side: Iterable[int], n: int) -> frozenset[int]:
    s = frozenset(side)
    if any(not 1 <= i <= n for i in s):
        raise InvalidCurve(f"Split {sorted(s)} has leaves outside 1..{n}")
    if n in s:
        s = frozenset(range(1, n + 1)) - s
    if not 2 <= len(s) <= n - 2:
        raise InvalidCurve(f"Split {sorted(s)} does not separate at least two leaves on each side")
    return s


def _split_key(side: frozenset[int]) -> tuple:
    return (len(side), tuple(sorted(side)))


def compatible(a: frozenset[int], b: frozenset[int]) -> bool:
    """Splits on the side without leaf n are compatible iff nested or disjoint."""
    return a <= b or b <= a or not (a & b)


@dataclass(frozen=True)
class RationalCurve:
    n: int
    splits: tuple[tuple[frozenset[int], Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.n < 3:
            raise InvalidCurve("A rational curve needs at least three leaves")
        merged: dict[frozenset[int], Fraction] = {}
        for side, length in self.splits:
            s = _leaf_side(side, self.n)
            merged[s] = merged.get(s, Fraction(0)) + Fraction(length)
        for s, length in merged.items():
            if length <= 0:
                raise InvalidCurve(f"Split {sorted(s)} has non-positive length {length}")
        sides = list(merged)
        for a, b in itertools.combinations(sides, 2):
            if not compatible(a, b):
                raise InvalidCurve(f"Splits {sorted(a)} and {sorted(b)} are not compatible")
        if len(sides) > self.n - 3:
            raise InvalidCurve(f"A curve with {self.n} leaves has at most {self.n - 3} bounded edges")
        ordered = tuple((s, merged[s]) for s in sorted(sides, key=_split_key))
        object.__setattr__(self, "splits", ordered)

    @classmethod
    def from_splits(cls, n: int, splits: Iterable[Iterable[int]], lengths: Iterable[int | Fraction] | None = None) -> "RationalCurve":
        sides = [frozenset(s) for s in splits]
        values = [Fraction(x) for x in lengths] if lengths is not None else [Fraction(1)] * len(sides)
        return cls(n=n, splits=tuple(zip(sides, values)))

    @property
    def sides(self) -> list[frozenset[int]]:
        return [s for s, _ in self.splits]

    @property
    def bounded_edges(self) -> int:
        return len(self.splits)

    @property
    def is_maximal(self) -> bool:
        return len(self.splits) == self.n - 3

    def combinatorial_type(self) -> "RationalCurve":
        return RationalCurve.from_splits(self.n, self.sides)

    def __add__(self, other: "RationalCurve") -> "RationalCurve":
        if other.n != self.n:
            raise InvalidCurve(f"Cannot add curves with {self.n} and {other.n} leaves")
        return RationalCurve(n=self.n, splits=self.splits + other.splits)

    def scaled(self, factor: int | Fraction) -> "RationalCurve":
        factor = Fraction(factor)
        if factor <= 0:
            raise InvalidCurve("Curves can only be scaled by positive numbers")
        return RationalCurve(n=self.n, splits=tuple((s, factor * length) for s, length in self.splits))

    def __str__(self) -> str:
        return format_curve(self)


def parse_curve(text: str, n: int) -> RationalCurve:
    """Parse ``(2,3) + (2,3,4):1/2``; a split may name either side."""
    if _RE_EMPTY.fullmatch(text):
        return RationalCurve(n=n)
    sides, lengths = [], []
    pos = 0
    while True:
        m = _RE_TERM.match(text, pos)
        if not m:
            raise ParseError("Expected a split such as (1,2)", pos)
        leaves = [int(x) for x in m.group("leaves").split(",")]
        for leaf in leaves:
            if not 1 <= leaf <= n:
                raise ParseError(f"Leaf {leaf} is outside 1..{n}", m.start("leaves"))
        sides.append(frozenset(leaves))
        lengths.append(Fraction(m.group("length")) if m.group("length") else Fraction(1))
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "+":
            raise ParseError("Expected '+' between splits", pos)
        pos += 1
    return RationalCurve.from_splits(n, sides, lengths)


def format_curve(curve: RationalCurve) -> str:
    if not curve.splits:
        return "0"
    terms = []
    for side, length in curve.splits:
        term = "(" + ",".join(str(i) for i in sorted(side)) + ")"
        if length != 1:
            term += f":{length}"
        terms.append(term)
    return " + ".join(terms)


# --- tree structure -----------------------------------------------------------------------

ROOT = ("root",)


@dataclass(frozen=True)
class CurveVertex:
    """A vertex with the leaf sets behind each adjacent edge; ``parts[0]`` contains leaf n."""

    parts: tuple[frozenset[int], ...]

    @property
    def valence(self) -> int:
        return len(self.parts)


def _parent_of(side: frozenset[int], sides: Sequence[frozenset[int]]):
    containing = [s for s in sides if side < s]
    if not containing:
        return ROOT
    return ("split", min(containing, key=len))


def curve_tree(curve: RationalCurve) -> nx.Graph:
    """Tree of the curve: leaves 1..n, one node per split plus the node next to leaf n."""
    n = curve.n
    sides = curve.sides
    lengths = dict(curve.splits)
    tree = nx.Graph()
    tree.add_node(ROOT)
    for side in sides:
        tree.add_edge(("split", side), _parent_of(side, sides), length=lengths[side])
    for leaf in range(1, n):
        tree.add_edge(leaf, _parent_of(frozenset({leaf}), sides), length=Fraction(0))
    tree.add_edge(n, ROOT, length=Fraction(0))
    return tree


def curve_vertices(curve: RationalCurve) -> list[CurveVertex]:
    n = curve.n
    everything = frozenset(range(1, n + 1))
    sides = curve.sides
    result = []
    for node in [ROOT] + [("split", s) for s in sides]:
        children = []
        for side in sides:
            if _parent_of(side, sides) == node:
                children.append(side)
        for leaf in range(1, n):
            if _parent_of(frozenset({leaf}), sides) == node:
                children.append(frozenset({leaf}))
        outward = frozenset({n}) if node == ROOT else everything - node[1]
        children.sort(key=min)
        result.append(CurveVertex(parts=(outward, *children)))
    return result


def _splits_of_tree(tree: nx.Graph, n: int, internal: set) -> list[tuple[frozenset[int], Fraction]]:
    """Splits of the bounded edges of a tree whose leaves are 1..n."""
    found = []
    for u, v, data in tree.edges(data=True):
        if u not in internal or v not in internal:
            continue
        length = Fraction(data.get("length", 1))
        if length == 0:
            continue
        pruned = tree.copy()
        pruned.remove_edge(u, v)
        side = frozenset(x for x in nx.node_connected_component(pruned, u) if x not in internal)
        if n in side:
            side = frozenset(range(1, n + 1)) - side
        found.append((side, length))
    return found


# --- metrics ------------------------------------------------------------------------------


def metric_pairs(n: int) -> list[tuple[int, int]]:
    """Coordinate order d(1,2), d(1,3), ..., d(n-1,n)."""
    return list(itertools.combinations(range(1, n + 1), 2))


def _n_from_pair_count(count: int, offset: int = 0) -> int:
    k = (1 + math.isqrt(1 + 8 * count)) // 2
    if k * (k - 1) // 2 != count:
        raise ValueError(f"{count} is not a binomial coefficient C(k, 2)")
    return k + offset


def split_metric(side: Iterable[int], n: int) -> IntVector:
    s = frozenset(side)
    return tuple(1 if (i in s) != (j in s) else 0 for i, j in metric_pairs(n))


def phi(a: Sequence[int | Fraction], n: int) -> tuple[Fraction, ...]:
    """The map a -> (a_i + a_j) whose image is the space of leaf-length changes."""
    return tuple(Fraction(a[i - 1]) + Fraction(a[j - 1]) for i, j in metric_pairs(n))


def curve_to_metric(curve: RationalCurve) -> tuple[Fraction, ...]:
    n = curve.n
    return tuple(
        sum((length for side, length in curve.splits if (i in side) != (j in side)), Fraction(0))
        for i, j in metric_pairs(n)
    )


@dataclass
class FourPointReport:
    holds: bool
    witness: tuple[int, int, int, int] | None = None


def _distance_table(d: Sequence[int | Fraction], n: int) -> dict[frozenset[int], Fraction]:
    return {frozenset(pair): Fraction(value) for pair, value in zip(metric_pairs(n), d)}


def four_point_check(d: Sequence[int | Fraction], n: int | None = None) -> FourPointReport:
    """For all x, y, z, t the maximum of the three pairings is attained at least twice."""
    n = n if n is not None else _n_from_pair_count(len(d))
    table = _distance_table(d, n)

    def dist(a: int, b: int) -> Fraction:
        return table[frozenset((a, b))]

    for x, y, z, t in itertools.combinations(range(1, n + 1), 4):
        sums = sorted([dist(x, y) + dist(z, t), dist(x, z) + dist(y, t), dist(x, t) + dist(y, z)])
        if sums[1] != sums[2]:
            return FourPointReport(holds=False, witness=(x, y, z, t))
    return FourPointReport(holds=True)


def in_image_of_phi(delta: Sequence[int | Fraction], n: int) -> bool:
    table = _distance_table(delta, n)
    a1 = (table[frozenset((1, 2))] + table[frozenset((1, 3))] - table[frozenset((2, 3))]) / 2
    a = {1: a1}
    for i in range(2, n + 1):
        a[i] = table[frozenset((1, i))] - a1
    return all(table[frozenset((i, j))] == a[i] + a[j] for i, j in metric_pairs(n))


def _pendant_lengths(table: dict[frozenset[int], Fraction], n: int) -> list[Fraction]:
    result = []
    for i in range(1, n + 1):
        others = [j for j in range(1, n + 1) if j != i]
        result.append(
            min(
                (table[frozenset((i, j))] + table[frozenset((i, l))] - table[frozenset((j, l))]) / 2
                for j, l in itertools.combinations(others, 2)
            )
        )
    return result


def _attach_last_three(tree: nx.Graph, active: Sequence[int], dist, label: int) -> None:
    a, b, c = active
    legs = {
        a: (dist(a, b) + dist(a, c) - dist(b, c)) / 2,
        b: (dist(a, b) + dist(b, c) - dist(a, c)) / 2,
        c: (dist(a, c) + dist(b, c) - dist(a, b)) / 2,
    }
    same = [x for x, value in legs.items() if value == 0]
    center = same[0] if same else label
    for x, length in legs.items():
        if x != center:
            tree.add_edge(center, x, length=length)


def metric_to_curve(d: Sequence[int | Fraction], n: int | None = None) -> RationalCurve:
    """Reconstruct a curve from a metric vector given modulo the image of phi."""
    n = n if n is not None else _n_from_pair_count(len(d))
    if len(d) != n * (n - 1) // 2:
        raise ValueError(f"A metric vector for {n} leaves has {n * (n - 1) // 2} entries, got {len(d)}")
    report = four_point_check(d, n)
    if not report.holds:
        raise NotATreeMetric(f"Four-point condition fails for leaves {report.witness}", report.witness)
    table = _distance_table(d, n)
    shortest = min(_pendant_lengths(table, n))
    if shortest < 1:
        # adding k to every leaf edge changes every distance by 2k
        shift = 1 - shortest
        logger.debug("Shifting metric by %s on every leaf", shift)
        table = {pair: value + 2 * shift for pair, value in table.items()}

    def dist(a: int, b: int) -> Fraction:
        return Fraction(0) if a == b else table[frozenset((a, b))]

    tree = nx.Graph()
    tree.add_nodes_from(range(1, n + 1))
    active = list(range(1, n + 1))
    next_label = n + 1
    while len(active) > 3:
        best = None
        for p, q in itertools.combinations(active, 2):
            for r in active:
                if r in (p, q):
                    continue
                value = dist(p, r) + dist(q, r) - dist(p, q)
                if best is None or value > best[0]:
                    best = (value, p, q, r)
        _, p, q, r = best
        to_p = (dist(p, q) + dist(p, r) - dist(q, r)) / 2
        to_q = dist(p, q) - to_p
        distances = {x: dist(x, p) - to_p for x in active if x not in (p, q)}
        distances[p], distances[q] = to_p, to_q
        same = [x for x, value in distances.items() if value == 0]
        if same:
            t = same[0]
        else:
            t = next_label
            next_label += 1
            for x, value in distances.items():
                if x not in (p, q):
                    table[frozenset((t, x))] = value
        for leaf, length in ((p, to_p), (q, to_q)):
            if leaf != t:
                tree.add_edge(t, leaf, length=length)
        active = sorted({x for x in active if x not in (p, q)} | {t})
    if len(active) == 2:
        a, b = active
        if dist(a, b) > 0:
            tree.add_edge(a, b, length=dist(a, b))
    else:
        _attach_last_three(tree, active, dist, next_label)
    internal = {v for v in tree.nodes if v > n}
    curve = RationalCurve(n=n, splits=tuple(_splits_of_tree(tree, n, internal)))
    delta = [Fraction(x) - y for x, y in zip(d, curve_to_metric(curve))]
    if not in_image_of_phi(delta, n):
        raise NotATreeMetric("Metric is not a tree metric modulo leaf lengths")
    return curve


# --- Pruefer sequences --------------------------------------------------------------------


@dataclass(frozen=True)
class PrueferSequence:
    n: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        d = len(self.entries) - self.n + 1
        if d < 0:
            raise InvalidCurve(f"A sequence for {self.n} leaves needs at least {self.n - 1} entries")
        labels = set(self.entries)
        if labels != set(range(self.n + 1, self.n + d + 2)):
            raise InvalidCurve(f"Entries must be exactly the labels {self.n + 1}..{self.n + d + 1}")
        for label in labels:
            if self.entries.count(label) < 2:
                raise InvalidCurve(f"Label {label} occurs only once")

    @property
    def bounded_edges(self) -> int:
        return len(self.entries) - self.n + 1

    @property
    def is_ordered(self) -> bool:
        first: list[int] = []
        for entry in self.entries:
            if entry not in first:
                first.append(entry)
        return first == sorted(first)

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


def pruefer_tree(sequence: PrueferSequence) -> nx.Graph:
    """Decode a Pruefer sequence into a labelled tree on 1..len+2."""
    total = len(sequence.entries) + 2
    degree = {v: 1 for v in range(1, total + 1)}
    for entry in sequence.entries:
        degree[entry] += 1
    leaves = [v for v, deg in degree.items() if deg == 1]
    heapq.heapify(leaves)
    tree = nx.Graph()
    tree.add_nodes_from(range(1, total + 1))
    for entry in sequence.entries:
        leaf = heapq.heappop(leaves)
        tree.add_edge(leaf, entry)
        degree[leaf] -= 1
        degree[entry] -= 1
        if degree[entry] == 1:
            heapq.heappush(leaves, entry)
    u, v = (x for x, deg in degree.items() if deg == 1)
    tree.add_edge(u, v)
    return tree


def pruefer_to_curve(sequence: PrueferSequence) -> RationalCurve:
    """Combinatorial type (unit lengths) of the tree encoded by the sequence."""
    tree = pruefer_tree(sequence)
    internal = {v for v in tree.nodes if v > sequence.n}
    return RationalCurve(n=sequence.n, splits=tuple(_splits_of_tree(tree, sequence.n, internal)))


def curve_to_pruefer(curve: RationalCurve) -> PrueferSequence:
    """Ordered Pruefer sequence of the combinatorial type; interior labels follow first appearance."""
    tree = curve_tree(curve)
    n = curve.n
    labels: dict = {leaf: leaf for leaf in range(1, n + 1)}
    node_of: dict[int, object] = {leaf: leaf for leaf in range(1, n + 1)}
    degree = dict(tree.degree())
    removed: set = set()
    heap = list(range(1, n + 1))
    heapq.heapify(heap)
    next_label = n + 1
    entries = []
    for _ in range(tree.number_of_nodes() - 2):
        node = node_of[heapq.heappop(heap)]
        neighbor = next(v for v in tree[node] if v not in removed)
        if neighbor not in labels:
            labels[neighbor] = next_label
            node_of[next_label] = neighbor
            next_label += 1
        entries.append(labels[neighbor])
        removed.add(node)
        degree[neighbor] -= 1
        if degree[neighbor] == 1:
            heapq.heappush(heap, labels[neighbor])
    return PrueferSequence(n=n, entries=tuple(entries))


def enumerate_m0n_cones(n: int) -> Iterator[PrueferSequence]:
    """Ordered sequences of trivalent types in lexicographic order; there are (2n-5)!! of them."""
    if n < 3:
        raise ValueError("M0,n needs n >= 3")
    last_label = 2 * n - 2
    sequence: list[int] = []

    # every label is used exactly twice; open labels have been used once
    def extend(open_labels: list[int], next_label: int) -> Iterator[PrueferSequence]:
        if not open_labels and next_label > last_label:
            yield PrueferSequence(n=n, entries=tuple(sequence))
            return
        for label in open_labels:
            sequence.append(label)
            yield from extend([x for x in open_labels if x != label], next_label)
            sequence.pop()
        if next_label <= last_label:
            sequence.append(next_label)
            yield from extend(open_labels + [next_label], next_label + 1)
            sequence.pop()

    yield from extend([], n + 1)


def enumerate_combinatorial_types(n: int, bounded_edges: int) -> Iterator[PrueferSequence]:
    """Ordered sequences of all types with the given number of bounded edges."""
    if not 0 <= bounded_edges <= n - 3:
        raise ValueError(f"A curve with {n} leaves has between 0 and {n - 3} bounded edges")
    length = n + bounded_edges - 1
    last_label = n + bounded_edges + 1
    sequence = [0] * length

    def place(label: int) -> Iterator[PrueferSequence]:
        free = [i for i, v in enumerate(sequence) if v == 0]
        if label == last_label:
            if len(free) >= 2:
                for i in free:
                    sequence[i] = label
                yield PrueferSequence(n=n, entries=tuple(sequence))
                for i in free:
                    sequence[i] = 0
            return
        first, rest = free[0], free[1:]
        reserve = 2 * (last_label - label)
        sequence[first] = label
        for extra in range(1, len(rest) - reserve + 1):
            for chosen in itertools.combinations(rest, extra):
                for i in chosen:
                    sequence[i] = label
                yield from place(label + 1)
                for i in chosen:
                    sequence[i] = 0
        sequence[first] = 0

    yield from place(n + 1)


# --- moduli coordinates and fans ----------------------------------------------------------


def moduli_ambient_dim(n: int) -> int:
    return (n - 1) * (n - 2) // 2


def lineality(n: int) -> IntVector:
    return (1,) * moduli_ambient_dim(n)


def split_ray(side: Iterable[int], n: int) -> IntVector:
    """v_I in matroid coordinates: the indicator of the edges of K_{n-1} inside I."""
    s = _leaf_side(side, n)
    return tuple(1 if a in s and b in s else 0 for a, b in complete_graph_edges(n - 1))


def curve_to_moduli(curve: RationalCurve) -> tuple[Fraction, ...]:
    n = curve.n
    point = [Fraction(0)] * moduli_ambient_dim(n)
    for side, length in curve.splits:
        for i, x in enumerate(split_ray(side, n)):
            point[i] += length * x
    return tuple(point)


def moduli_to_metric(x: Sequence[int | Fraction], n: int | None = None) -> tuple[Fraction, ...]:
    n = n if n is not None else _n_from_pair_count(len(x), offset=1)
    coordinates = dict(zip(complete_graph_edges(n - 1), x))
    return tuple(Fraction(0) if j == n else -2 * Fraction(coordinates[(i, j)]) for i, j in metric_pairs(n))


def metric_to_moduli(d: Sequence[int | Fraction], n: int | None = None) -> tuple[Fraction, ...]:
    n = n if n is not None else _n_from_pair_count(len(d))
    table = _distance_table(d, n)
    return tuple(
        (table[frozenset((i, n))] + table[frozenset((j, n))] - table[frozenset((i, j))]) / 2
        for i, j in complete_graph_edges(n - 1)
    )


def moduli_to_curve(x: Sequence[int | Fraction], n: int | None = None) -> RationalCurve:
    n = n if n is not None else _n_from_pair_count(len(x), offset=1)
    return metric_to_curve(moduli_to_metric(x, n), n)


def curve_cone(curve: RationalCurve) -> Polyhedron:
    """The cone of M0,n whose relative interior holds the curves of this type."""
    n = curve.n
    return Polyhedron.cone([split_ray(s, n) for s in curve.sides], [lineality(n)], ambient_dim=moduli_ambient_dim(n))


def m0n(n: int, threads: int | None = None) -> TropicalCycle:
    curves = [pruefer_to_curve(p) for p in enumerate_m0n_cones(n)]
    logger.debug("M0,%d: %d maximal cones", n, len(curves))
    cells = parallel_map(curve_cone, curves, threads)
    return TropicalCycle.from_cells(cells, [1] * len(cells), ambient_dim=moduli_ambient_dim(n))


# --- psi classes --------------------------------------------------------------------------


def _placements(exponents: Sequence[int]) -> Iterator[list[int]]:
    """Index sets J containing 0 with |J| = 2 + sum of exponents over J, for descending exponents."""
    m = len(exponents)
    if not m or sum(exponents) > m - 2:
        return

    def extend(chosen: list[int], total: int) -> Iterator[list[int]]:
        if len(chosen) == 2 + total:
            yield list(chosen)
            return
        for nxt in range(chosen[-1] + 1, m):
            chosen.append(nxt)
            yield from extend(chosen, total + exponents[nxt])
            chosen.pop()

    yield from extend([0], exponents[0])


def psi_product_sequences_ordered(k: Sequence[int]) -> Iterator[PrueferSequence]:
    """Ordered sequences of the maximal cones of the psi product; ``k`` must be descending."""
    n = len(k)
    degree = sum(k)
    length = 2 * n - 4 - degree
    exponents = list(k[:length]) + [0] * max(0, length - n)
    last_label = 2 * n - 2 - degree
    sequence = [0] * length

    def place(label: int) -> Iterator[PrueferSequence]:
        free = [i for i, v in enumerate(sequence) if v == 0]
        if label > last_label:
            if not free:
                yield PrueferSequence(n=n, entries=tuple(sequence))
            return
        for chosen in _placements([exponents[i] for i in free]):
            for j in chosen:
                sequence[free[j]] = label
            yield from place(label + 1)
            for j in chosen:
                sequence[free[j]] = 0

    yield from place(n + 1)


def psi_product_sequences(k: Sequence[int]) -> Iterator[PrueferSequence]:
    """Sort the exponents, run the ordered algorithm, then relabel the leaf entries back."""
    n = len(k)
    order = sorted(range(n), key=lambda i: -k[i])
    for sequence in psi_product_sequences_ordered([k[i] for i in order]):
        entries = list(sequence.entries)
        if len(entries) < n:
            yield sequence
            continue
        relabelled = list(entries)
        for j in range(n):
            relabelled[order[j]] = entries[j]
        yield PrueferSequence(n=n, entries=tuple(relabelled))


def psi_weight(curve: RationalCurve, k: Sequence[int]) -> int:
    """prod over vertices of K(I_V)! divided by prod of k_i!, I_V the leaves at V."""
    tree = curve_tree(curve)
    at_vertex: dict = {}
    for leaf in range(1, curve.n + 1):
        vertex = next(iter(tree[leaf]))
        at_vertex[vertex] = at_vertex.get(vertex, 0) + k[leaf - 1]
    numerator = math.prod(math.factorial(total) for total in at_vertex.values())
    return numerator // math.prod(math.factorial(x) for x in k)


def psi_product(n: int, k: Sequence[int], threads: int | None = None) -> TropicalCycle:
    k = list(k)
    if len(k) != n:
        raise ValueError(f"Expected {n} exponents, got {len(k)}")
    if any(x < 0 for x in k):
        raise ValueError("Psi exponents must be non-negative")
    if sum(k) > n - 3:
        raise DegreeTooLarge(f"Total degree {sum(k)} exceeds dim M0,{n} = {n - 3}")
    curves = [pruefer_to_curve(p) for p in psi_product_sequences(k)]
    logger.debug("Psi product %s: %d cones", k, len(curves))
    cells = parallel_map(curve_cone, curves, threads)
    weights = [psi_weight(c, k) for c in curves]
    return TropicalCycle.from_cells(cells, weights, ambient_dim=moduli_ambient_dim(n))


# --- local structure ----------------------------------------------------------------------


@dataclass
class LocalBasis:
    curve: RationalCurve
    vectors: list[IntVector] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def _vertex_basis(vertex: CurveVertex, n: int) -> list[IntVector]:
    parts = vertex.parts
    pairs = list(itertools.combinations(range(1, len(parts)), 2))
    return [split_ray(parts[i] | parts[j], n) for i, j in pairs if (i, j) != (1, 2)]


def local_basis(curve: RationalCurve) -> LocalBasis:
    """Rays of the type plus, at each vertex of valence s > 3, C(s,2) - s resolving rays."""
    n = curve.n
    vectors = [split_ray(s, n) for s in curve.sides]
    for vertex in curve_vertices(curve):
        if vertex.valence > 3:
            vectors.extend(_vertex_basis(vertex, n))
    return LocalBasis(curve=curve, vectors=vectors)


def _resolutions(vertex: CurveVertex) -> list[list[frozenset[int]]]:
    """Every trivalent resolution of one vertex, as lists of new splits."""
    parts = vertex.parts
    s = len(parts)
    result = []
    for sequence in enumerate_m0n_cones(s):
        local = pruefer_to_curve(sequence)
        result.append([frozenset().union(*(parts[i] for i in side)) for side in local.sides])
    return result


def local_m0n(curve: RationalCurve, threads: int | None = None) -> TropicalCycle:
    """Maximal cones of M0,n containing the cone of ``curve``, local at that cone."""
    n = curve.n
    base = curve.sides
    choices = [_resolutions(v) for v in curve_vertices(curve)]
    types = [
        RationalCurve.from_splits(n, base + [side for block in combo for side in block])
        for combo in itertools.product(*choices)
    ]
    logger.debug("Local M0,%d: %d maximal cones", n, len(types))
    cells = parallel_map(curve_cone, types, threads)
    return TropicalCycle.from_cells(
        cells, [1] * len(cells), ambient_dim=moduli_ambient_dim(n), local_cone=curve_cone(curve.combinatorial_type())
    )


@dataclass
class RelationReport:
    vertex: CurveVertex
    sum_relation: bool
    ray_relations: dict[frozenset[int], bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.sum_relation and all(self.ray_relations.values())


def _add(*vectors: Sequence[int | Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((Fraction(x) for x in column), Fraction(0)) for column in zip(*vectors))


def _times(c: int | Fraction, v: Sequence[int | Fraction]) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) * x for x in v)


def _part_metric(part: frozenset[int], n: int) -> IntVector:
    return split_metric(part, n) if len(part) > 1 else (0,) * (n * (n - 1) // 2)


def _indicator(leaves: Iterable[int], n: int) -> list[int]:
    s = set(leaves)
    return [1 if i in s else 0 for i in range(1, n + 1)]


def _check_vertex(vertex: CurveVertex, n: int) -> RelationReport:
    """Both relations hold exactly in R^{C(n,2)} once singleton parts contribute nothing."""
    parts = vertex.parts
    s = len(parts)
    first = parts[0]
    at_p = {next(iter(p)) for p in parts if len(p) == 1}
    zero = (0,) * (n * (n - 1) // 2)

    # sum of the resolving rays pairing two parts away from parts[0]
    lhs = _add(zero, *(split_metric(parts[i] | parts[j], n) for i, j in itertools.combinations(range(1, s), 2)))
    rays = _add(_times(s - 3, _add(zero, *(_part_metric(parts[j], n) for j in range(1, s)))), _part_metric(first, n))
    a = [1 if i in first else s - 3 for i in range(1, n + 1)]
    b = [0 if i in at_p else (1 if i in first else s - 3) for i in range(1, n + 1)]
    residual = _add(lhs, _times(-1, rays))
    sum_relation = in_image_of_phi(residual, n) and residual == _add(phi(a, n), _times(-1, phi(b, n)))
    report = RelationReport(vertex=vertex, sum_relation=sum_relation)

    for size in range(3, s - 1):
        for chosen in itertools.combinations(range(1, s), size):
            side = frozenset().union(*(parts[i] for i in chosen))
            m = len(chosen)
            z = _add(
                zero,
                *(split_metric(parts[i] | parts[j], n) for i, j in itertools.combinations(chosen, 2)),
                _times(-(m - 2), phi(_indicator(side, n), n)),
            )
            # w is -2 on pairs inside one chosen part and 0 elsewhere
            bigger = [parts[j] for j in chosen if len(parts[j]) > 1]
            w = _add(
                zero,
                *(split_metric(part, n) for part in bigger),
                _times(-1, phi(_indicator(frozenset().union(*bigger), n), n)),
            )
            report.ray_relations[side] = _add(z, _times(-(m - 2), w)) == _add(zero, split_metric(side, n))
    return report


def lemma_relations_check(curve: RationalCurve) -> list[RelationReport]:
    """Evaluate, in metric coordinates, the linear relations among resolving rays at each vertex of valence > 3."""
    return [_check_vertex(v, curve.n) for v in curve_vertices(curve) if v.valence > 3]

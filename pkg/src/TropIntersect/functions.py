from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cycles import (
    PolyhedralComplex,
    TropicalCycle,
    primitive_normal,
    refine_cycle,
)
from .errors import ParseError, SupportNotContained
from .exact_arith import RatVector, dot, solve
from .polyhedra import Polyhedron, intersect_polyhedra
from .utils import parallel_map

logger = logging.getLogger(__name__)

MAX = "max"
MIN = "min"

_RE_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z]+[0-9]*)|(?P<op>[-+*(),]))")
_RE_INDEXED = re.compile(r"^[xX](\d+)$")
_LETTER_VARS = {"x": 0, "y": 1, "z": 2}

Term = tuple[tuple[int, ...], Fraction]


@dataclass(frozen=True)
class TropicalPolynomial:
    """``max`` (or ``min``) of affine terms ``<v_i, x> + α_i``."""

    mode: str
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.mode not in (MAX, MIN):
            raise ValueError(f"mode must be 'max' or 'min', got {self.mode!r}")
        if not self.terms:
            raise ValueError("A tropical polynomial needs at least one term")
        merged: dict[tuple[int, ...], Fraction] = {}
        pick = max if self.mode == MAX else min
        for exponent, coefficient in self.terms:
            exponent = tuple(int(e) for e in exponent)
            coefficient = Fraction(coefficient)
            merged[exponent] = pick(merged[exponent], coefficient) if exponent in merged else coefficient
        if len({len(e) for e in merged}) != 1:
            raise ValueError("All exponents must have the same length")
        object.__setattr__(self, "terms", tuple(sorted(merged.items())))

    @property
    def n_vars(self) -> int:
        return len(self.terms[0][0])

    def evaluate(self, x: Sequence[int | Fraction]) -> Fraction:
        values = [dot(v, x) + a for v, a in self.terms]
        return max(values) if self.mode == MAX else min(values)

    def as_max(self) -> "TropicalPolynomial":
        """min-polynomials become max of the negated terms."""
        if self.mode == MAX:
            return self
        return TropicalPolynomial(MAX, tuple((tuple(-e for e in v), -a) for v, a in self.terms))

    def __str__(self) -> str:
        return f"{self.mode}({','.join(_format_term(v, a) for v, a in self.terms)})"


def _format_term(exponent: Sequence[int], constant: Fraction) -> str:
    names = ["x", "y", "z"] if len(exponent) <= 3 else [f"x{i + 1}" for i in range(len(exponent))]
    parts = []
    for name, c in zip(names, exponent):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(f"{sign}{mag}{name}")
    if constant != 0 or not parts:
        parts.append(f"{'-' if constant < 0 else '+'}{abs(constant)}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


# --- parsing -----------------------------------------------------------------------------


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = _RE_TOKEN.match(stripped, pos)
        if not match or match.end() == pos:
            raise ParseError(f"Unexpected character {stripped[pos]!r}", pos)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    return tokens


def parse_polynomial(text: str, n: int | None = None) -> TropicalPolynomial:
    """Parse ``max(3x+4, x-y-z)`` or ``min(2x1+1/2, x2)``.

    Variables are x, y, z or x1..xn; variable coefficients must be integers and
    constants may be rationals ``p/q``.
    """
    tokens = _tokenize(text)
    if len(tokens) < 3 or tokens[0][0] != "var" or tokens[0][1].lower() not in (MAX, MIN):
        raise ParseError("Expected 'max(' or 'min(' at the start", 0)
    mode = tokens[0][1].lower()
    if tokens[1][1] != "(":
        raise ParseError("Expected '('", tokens[1][2])
    pos = 2
    raw_terms: list[tuple[dict[int, int], Fraction]] = []
    letter_style: set[bool] = set()
    while True:
        linear: dict[int, int] = {}
        constant = Fraction(0)
        expect_term = True
        sign = 1
        while pos < len(tokens) and tokens[pos][1] not in (",", ")"):
            kind, value, at = tokens[pos]
            if kind == "op" and value in "+-":
                if not expect_term and value in "+-":
                    expect_term = True
                sign = sign * (-1 if value == "-" else 1)
                pos += 1
                continue
            if not expect_term:
                raise ParseError(f"Expected operator before {value!r}", at)
            if kind == "num":
                number = Fraction(value)
                nxt = tokens[pos + 1] if pos + 1 < len(tokens) else None
                if nxt is not None and nxt[1] == "*":
                    pos += 1
                    nxt = tokens[pos + 1] if pos + 1 < len(tokens) else None
                    if nxt is None or nxt[0] != "var":
                        raise ParseError("Expected variable after '*'", tokens[pos][2])
                if nxt is not None and nxt[0] == "var":
                    if number.denominator != 1:
                        raise ParseError("Variable coefficients must be integers", at)
                    index, style = _variable_index(nxt[1], nxt[2])
                    letter_style.add(style)
                    linear[index] = linear.get(index, 0) + sign * int(number)
                    pos += 2
                else:
                    constant += sign * number
                    pos += 1
            elif kind == "var":
                index, style = _variable_index(value, at)
                letter_style.add(style)
                linear[index] = linear.get(index, 0) + sign
                pos += 1
            else:
                raise ParseError(f"Unexpected {value!r}", at)
            sign = 1
            expect_term = False
        if expect_term:
            at = tokens[pos][2] if pos < len(tokens) else len(text)
            raise ParseError("Empty or incomplete term", at)
        raw_terms.append((linear, constant))
        if pos >= len(tokens):
            raise ParseError("Missing closing ')'", len(text))
        if tokens[pos][1] == ")":
            pos += 1
            break
        pos += 1
    if pos != len(tokens):
        raise ParseError("Trailing input after ')'", tokens[pos][2])
    if len(letter_style) > 1:
        raise ParseError("Do not mix x,y,z with indexed variables x1..xn", 0)
    used = max((i for linear, _ in raw_terms for i in linear), default=-1) + 1
    size = n if n is not None else max(used, 1)
    if used > size:
        raise ParseError(f"Polynomial uses {used} variables but n = {size}", 0)
    terms = tuple(
        (tuple(linear.get(i, 0) for i in range(size)), constant) for linear, constant in raw_terms
    )
    return TropicalPolynomial(mode, terms)


def _variable_index(name: str, at: int) -> tuple[int, bool]:
    lowered = name.lower()
    if lowered in _LETTER_VARS:
        return _LETTER_VARS[lowered], True
    match = _RE_INDEXED.match(name)
    if match and int(match.group(1)) >= 1:
        return int(match.group(1)) - 1, False
    raise ParseError(f"Unknown variable {name!r}", at)


# --- functions on complexes ------------------------------------------------------------


@dataclass(frozen=True)
class AffinePiece:
    cell: Polyhedron
    linear: RatVector
    constant: Fraction

    def value(self, x: Sequence[int | Fraction]) -> Fraction:
        return dot(self.linear, x) + self.constant


@dataclass(frozen=True)
class NewtonData:
    polytope: Polyhedron
    pieces: tuple[AffinePiece, ...]

    @property
    def complex(self) -> PolyhedralComplex:
        return PolyhedralComplex(
            ambient_dim=self.polytope.ambient_dim - 1, maximal_cells=tuple(p.cell for p in self.pieces)
        )


def linearity_complex(phi: TropicalPolynomial, n: int | None = None) -> NewtonData:
    """Newton polytope conv{(v_i, α_i)} and the complete complex on whose cells φ is affine."""
    # a min polynomial is minus the max of the negated terms
    sign = 1 if phi.mode == MAX else -1
    phi = phi.as_max()
    n = n if n is not None else phi.n_vars
    if n != phi.n_vars:
        raise ValueError(f"Polynomial has {phi.n_vars} variables, expected {n}")
    polytope = Polyhedron.from_v([tuple(v) + (a,) for v, a in phi.terms], ambient_dim=n + 1)
    pieces = []
    for v, a in phi.terms:
        rows = [
            (a - b,) + tuple(x - y for x, y in zip(v, w)) for w, b in phi.terms if w != v
        ]
        cell = Polyhedron.from_h_rows(rows, [], n)
        if cell.dim == n:
            pieces.append(
                AffinePiece(cell=cell, linear=tuple(Fraction(sign * x) for x in v), constant=Fraction(sign * a))
            )
    pieces.sort(key=lambda p: p.cell.sort_key())
    logger.debug("Linearity complex of %s has %d cells", phi, len(pieces))
    return NewtonData(polytope=polytope, pieces=tuple(pieces))


@dataclass(frozen=True)
class RationalFunctionOnCycle:
    """Piecewise affine function on the maximal cells of a domain complex Y."""

    domain: PolyhedralComplex
    pieces: tuple[AffinePiece, ...]

    @classmethod
    def from_values(
        cls,
        domain: PolyhedralComplex,
        vertex_values: dict[tuple, int | Fraction],
        ray_slopes: dict[tuple, int | Fraction],
    ) -> "RationalFunctionOnCycle":
        """Interpolate each cell's affine function from vertex values and ray/lineality slopes."""
        pieces = []
        n = domain.ambient_dim
        for cell in domain.maximal_cells:
            rows, rhs = [], []
            for v in cell.v.vertices:
                rows.append(list(v) + [1])
                rhs.append(Fraction(vertex_values[tuple(v)]))
            for r in list(cell.v.rays) + list(cell.v.lineality):
                rows.append(list(r) + [0])
                rhs.append(Fraction(ray_slopes[tuple(r)]))
            solution = solve(rows, rhs)
            if solution is None:
                raise ValueError("Values and slopes are inconsistent on a cell")
            pieces.append(AffinePiece(cell=cell, linear=tuple(solution[:n]), constant=solution[n]))
        function = cls(domain=domain, pieces=tuple(pieces))
        function.validate()
        return function

    @classmethod
    def from_polynomial(cls, phi: TropicalPolynomial, n: int | None = None) -> "RationalFunctionOnCycle":
        data = linearity_complex(phi, n)
        return cls(domain=data.complex, pieces=data.pieces)

    def validate(self) -> None:
        """Slopes must be integral on lattice directions of each cell."""
        for piece in self.pieces:
            for b in piece.cell.span_basis:
                if dot(piece.linear, b).denominator != 1:
                    raise ValueError("Function has non-integral slope on a lattice direction")

    def piece_containing(self, cell: Polyhedron) -> AffinePiece | None:
        for piece in self.pieces:
            if piece.cell.contains_polyhedron(cell):
                return piece
        return None

    def evaluate(self, x: Sequence[int | Fraction]) -> Fraction:
        for piece in self.pieces:
            if piece.cell.contains(x):
                return piece.value(x)
        raise SupportNotContained("Point lies outside the domain of the function")

    def vertex_values(self) -> dict[tuple, Fraction]:
        values: dict[tuple, Fraction] = {}
        for piece in self.pieces:
            for v in piece.cell.v.vertices:
                values.setdefault(tuple(v), piece.value(v))
        return values

    def ray_slopes(self) -> dict[tuple, Fraction]:
        slopes: dict[tuple, Fraction] = {}
        for piece in self.pieces:
            for r in list(piece.cell.v.rays) + list(piece.cell.v.lineality):
                slopes.setdefault(tuple(r), dot(piece.linear, r))
        return slopes


def linear_combination(
    functions: Sequence[tuple[int, RationalFunctionOnCycle | TropicalPolynomial]],
    n: int | None = None,
) -> RationalFunctionOnCycle:
    """Σ c_i f_i on the common refinement of the domains."""
    if not functions:
        raise ValueError("linear_combination needs at least one function")
    converted = [
        (int(c), f if isinstance(f, RationalFunctionOnCycle) else RationalFunctionOnCycle.from_polynomial(f, n))
        for c, f in functions
    ]
    scalar, first = converted[0]
    pieces = [
        AffinePiece(p.cell, tuple(scalar * x for x in p.linear), scalar * p.constant) for p in first.pieces
    ]
    for scalar, function in converted[1:]:
        combined = []
        for a in pieces:
            for b in function.pieces:
                meet = intersect_polyhedra(a.cell, b.cell)
                if meet.dim != a.cell.dim:
                    continue
                combined.append(
                    AffinePiece(
                        meet,
                        tuple(x + scalar * y for x, y in zip(a.linear, b.linear)),
                        a.constant + scalar * b.constant,
                    )
                )
        pieces = combined
    pieces.sort(key=lambda p: p.cell.sort_key())
    ambient = first.domain.ambient_dim
    domain = PolyhedralComplex(ambient_dim=ambient, maximal_cells=tuple(p.cell for p in pieces))
    return RationalFunctionOnCycle(domain=domain, pieces=tuple(pieces))


# --- divisors ----------------------------------------------------------------------------


def _pieces_of(phi: TropicalPolynomial | RationalFunctionOnCycle, n: int) -> tuple[AffinePiece, ...]:
    if isinstance(phi, TropicalPolynomial):
        return linearity_complex(phi, n).pieces
    return phi.pieces


def _find_piece(pieces: Sequence[AffinePiece], cell: Polyhedron) -> AffinePiece | None:
    for piece in pieces:
        if piece.cell.contains_polyhedron(cell):
            return piece
    return None


def divisor(
    phi: TropicalPolynomial | RationalFunctionOnCycle,
    x: TropicalCycle,
    threads: int | None = None,
) -> TropicalCycle:
    """Weil divisor φ·X on the codimension-one skeleton of X refined along φ.

    ω(τ) = Σ ω(σ) φ_σ(u_{σ/τ}) − φ_τ(Σ ω(σ) u_{σ/τ}); cells of weight zero are dropped.
    """
    n = x.ambient_dim
    x = x.normalized()
    if x.is_empty or x.dim <= 0:
        return TropicalCycle.empty(n)
    pieces = _pieces_of(phi, n)
    assignment = [_find_piece(pieces, cell) for cell in x.cells]
    if all(p is not None for p in assignment):
        refined = x
    else:
        refined = refine_cycle(x, [p.cell for p in pieces], threads)
        assignment = [_find_piece(pieces, cell) for cell in refined.cells]
    linear = [p.linear for p in assignment]

    incidence = [(tau, adj) for tau, adj in refined.complex.codim_one_incidence if refined.complex.is_relevant(tau)]

    def weight_at(item: tuple[Polyhedron, tuple[int, ...]]) -> int:
        tau, adjacent = item
        total_value = Fraction(0)
        total_vector = [0] * n
        for index in adjacent:
            u = primitive_normal(tau, refined.cells[index])
            w = refined.weights[index]
            total_value += w * dot(linear[index], u)
            total_vector = [t + w * c for t, c in zip(total_vector, u)]
        weight = total_value - dot(linear[adjacent[0]], total_vector)
        if weight.denominator != 1:
            raise ValueError("Divisor weight is not integral; function has non-integral slopes")
        return int(weight)

    weights = parallel_map(weight_at, incidence, threads)
    cells = [tau for (tau, _), w in zip(incidence, weights) if w != 0]
    kept = [w for w in weights if w != 0]
    logger.debug("Divisor: %d codimension-one cells, %d with nonzero weight", len(incidence), len(cells))
    return TropicalCycle.from_cells(cells, kept, ambient_dim=n, local_cone=x.local_cone)


def divisor_power(
    phi: TropicalPolynomial | RationalFunctionOnCycle,
    k: int,
    x: TropicalCycle,
    threads: int | None = None,
) -> TropicalCycle:
    if k < 0:
        raise ValueError("k must be nonnegative")
    result = x
    for _ in range(k):
        result = divisor(phi, result, threads)
    return result


def successive_divisors(
    functions: Iterable[TropicalPolynomial | RationalFunctionOnCycle],
    x: TropicalCycle,
    threads: int | None = None,
) -> TropicalCycle:
    result = x
    for phi in functions:
        result = divisor(phi, result, threads)
    return result

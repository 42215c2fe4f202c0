from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import yaml

from .cycles import TropicalCycle
from .errors import ParseError
from .functions import RationalFunctionOnCycle, TropicalPolynomial, parse_polynomial
from .matroids import Matroid, matrix_matroid
from .polyhedra import Polyhedron

_RE_RATIONAL = re.compile(r"\s*-?\d+(?:/\d+)?\s*")


def format_rational(x: int | Fraction) -> str:
    return str(Fraction(x))


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a rational number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RE_RATIONAL.fullmatch(value):
        return Fraction(value.strip())
    raise ParseError(f"{where}: expected a rational number such as '3/4', got {value!r}")


def _rows(value: Any, where: str, width: int | None = None) -> list[tuple[Fraction, ...]]:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ParseError(f"{where} must be a list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ParseError(f"{where}[{i}] must be a list")
        parsed = tuple(parse_rational(x, f"{where}[{i}]") for x in row)
        if width is not None and len(parsed) != width:
            raise ParseError(f"{where}[{i}] has {len(parsed)} entries, expected {width}")
        rows.append(parsed)
    return rows


def _format_rows(rows: Sequence[Sequence[int | Fraction]]) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in rows]


def _mapping(text: str, what: str) -> dict:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ParseError(f"{what} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{what} root must be a mapping")
    return data


def read_text(path: str | Path) -> str:
    input_path = Path(path).expanduser()
    if not input_path.exists():
        raise FileNotFoundError(f"Input file not found: {input_path}")
    return input_path.read_text(encoding="utf-8")


# --- cycles -------------------------------------------------------------------------------


def _shared_lineality(cycle: TropicalCycle) -> tuple:
    spaces = {cell.v.lineality for cell in cycle.cells}
    if cycle.local_cone is not None and cycle.cells:
        spaces.add(cycle.local_cone.v.lineality)
    if len(spaces) > 1:
        raise ValueError("Cells of the cycle do not share a lineality space")
    return next(iter(spaces)) if spaces else ()


def cycle_to_document(cycle: TropicalCycle) -> dict:
    """Homogeneous generator pool: vertices are (1, v), rays are (0, r)."""
    lineality = _shared_lineality(cycle)
    pool: dict[tuple, int] = {}

    def indices(cell: Polyhedron) -> list[int]:
        generators = [(Fraction(1),) + tuple(v) for v in cell.v.vertices]
        generators += [(Fraction(0),) + tuple(Fraction(x) for x in r) for r in cell.v.rays]
        result = []
        for g in generators:
            result.append(pool.setdefault(g, len(pool)))
        return sorted(result)

    cells = [indices(cell) for cell in cycle.cells]
    document: dict[str, Any] = {
        "ambient_dim": cycle.ambient_dim,
        "rays": [],
        "lineality": _format_rows([(0,) + tuple(l) for l in lineality]),
        "maximal_cells": cells,
        "weights": list(cycle.weights),
    }
    if cycle.local_cone is not None:
        document["local_cone"] = indices(cycle.local_cone)
    document["rays"] = _format_rows(sorted(pool, key=pool.get))
    return document


def _cell(indices: Any, rays: list[tuple[Fraction, ...]], lineality: list, n: int, where: str) -> Polyhedron:
    if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
        raise ParseError(f"{where} must be a list of ray indices")
    if any(not 0 <= i < len(rays) for i in indices):
        raise ParseError(f"{where} refers to a ray index outside 0..{len(rays) - 1}")
    vertices = [tuple(x / rays[i][0] for x in rays[i][1:]) for i in indices if rays[i][0] != 0]
    directions = [rays[i][1:] for i in indices if rays[i][0] == 0]
    if not vertices:
        raise ParseError(f"{where} has no vertex")
    return Polyhedron.from_v(vertices, directions, lineality, ambient_dim=n)


def cycle_from_document(data: dict) -> TropicalCycle:
    if "ambient_dim" not in data:
        raise ParseError("Cycle document is missing 'ambient_dim'")
    n = data["ambient_dim"]
    if not isinstance(n, int) or n < 0:
        raise ParseError("'ambient_dim' must be a non-negative integer")
    rays = _rows(data.get("rays"), "rays", n + 1)
    lineality = [row[1:] for row in _rows(data.get("lineality"), "lineality", n + 1)]
    cells_raw = data.get("maximal_cells") or []
    weights = data.get("weights")
    if weights is None:
        weights = [1] * len(cells_raw)
    if not isinstance(weights, list) or len(weights) != len(cells_raw):
        raise ParseError("'weights' must be a list aligned with 'maximal_cells'")
    if not all(isinstance(w, int) and not isinstance(w, bool) for w in weights):
        raise ParseError("'weights' must be integers")
    cells = [_cell(c, rays, lineality, n, f"maximal_cells[{i}]") for i, c in enumerate(cells_raw)]
    local = data.get("local_cone")
    local_cone = _cell(local, rays, lineality, n, "local_cone") if local is not None else None
    return TropicalCycle.from_cells(cells, weights, ambient_dim=n, local_cone=local_cone)


def parse_cycle_document(text: str) -> TropicalCycle:
    return cycle_from_document(_mapping(text, "Cycle document"))


def dump_cycle(cycle: TropicalCycle) -> str:
    return yaml.safe_dump(cycle_to_document(cycle), sort_keys=False, default_flow_style=None)


def load_cycle(path: str | Path) -> TropicalCycle:
    return parse_cycle_document(read_text(path))


def save_cycle(cycle: TropicalCycle, path: str | Path) -> Path:
    out_path = Path(path).expanduser()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(dump_cycle(cycle), encoding="utf-8")
    return out_path


# --- rational functions -------------------------------------------------------------------


def function_to_document(function: RationalFunctionOnCycle) -> dict:
    domain = TropicalCycle.from_cells(
        function.domain.maximal_cells,
        [1] * len(function.domain.maximal_cells),
        ambient_dim=function.domain.ambient_dim,
    )
    document = cycle_to_document(domain)
    document.pop("weights")
    document["vertex_values"] = [
        {"point": [format_rational(x) for x in point], "value": format_rational(value)}
        for point, value in sorted(function.vertex_values().items())
    ]
    document["ray_slopes"] = [
        {"direction": [format_rational(x) for x in direction], "slope": format_rational(slope)}
        for direction, slope in sorted(function.ray_slopes().items())
    ]
    return document


def function_from_document(data: dict) -> RationalFunctionOnCycle | TropicalPolynomial:
    """A ``polynomial`` string, or a domain with ``vertex_values`` and ``ray_slopes``."""
    if "polynomial" in data:
        n = data.get("ambient_dim")
        return parse_polynomial(str(data["polynomial"]), n)
    domain = cycle_from_document(data).complex
    values = {}
    for i, entry in enumerate(data.get("vertex_values") or []):
        if not isinstance(entry, dict) or "point" not in entry or "value" not in entry:
            raise ParseError(f"vertex_values[{i}] needs 'point' and 'value'")
        point = tuple(parse_rational(x, f"vertex_values[{i}].point") for x in entry["point"])
        values[point] = parse_rational(entry["value"], f"vertex_values[{i}].value")
    slopes = {}
    for i, entry in enumerate(data.get("ray_slopes") or []):
        if not isinstance(entry, dict) or "direction" not in entry or "slope" not in entry:
            raise ParseError(f"ray_slopes[{i}] needs 'direction' and 'slope'")
        direction = tuple(parse_rational(x, f"ray_slopes[{i}].direction") for x in entry["direction"])
        slopes[direction] = parse_rational(entry["slope"], f"ray_slopes[{i}].slope")
    try:
        return RationalFunctionOnCycle.from_values(domain, values, slopes)
    except KeyError as exc:
        raise ParseError(f"No value given for generator {list(exc.args[0])}") from exc


def parse_function_document(text: str) -> RationalFunctionOnCycle | TropicalPolynomial:
    return function_from_document(_mapping(text, "Function document"))


def dump_function(function: RationalFunctionOnCycle) -> str:
    return yaml.safe_dump(function_to_document(function), sort_keys=False, default_flow_style=None)


# --- matroids -----------------------------------------------------------------------------


def matroid_from_document(data: dict) -> Matroid:
    if "matrix" in data:
        return matrix_matroid(_rows(data["matrix"], "matrix"))
    if "n" not in data or "bases" not in data:
        raise ParseError("Matroid document needs 'n' and 'bases', or 'matrix'")
    n = data["n"]
    bases = data["bases"]
    if not isinstance(n, int) or not isinstance(bases, list):
        raise ParseError("'n' must be an integer and 'bases' a list of index lists")
    if not all(isinstance(b, list) and all(isinstance(e, int) for e in b) for b in bases):
        raise ParseError("'bases' must be a list of index lists")
    matroid = Matroid.from_bases(n, bases)
    if "rank" in data and data["rank"] != matroid.rank:
        raise ParseError(f"Declared rank {data['rank']} differs from basis size {matroid.rank}")
    return matroid


def parse_matroid_document(text: str) -> Matroid:
    return matroid_from_document(_mapping(text, "Matroid document"))


def matroid_to_document(matroid: Matroid) -> dict:
    return {"n": matroid.n, "rank": matroid.rank, "bases": [list(b) for b in matroid.sorted_bases]}

from __future__ import annotations

import argparse
import json
import logging
import re
from fractions import Fraction
from typing import Any

from .bench import SUITES, bench_bergman, bench_divisors, bench_intersect, bench_moduli, format_table, parse_int_list
from .cycle_io import (
    cycle_to_document,
    dump_cycle,
    format_rational,
    load_cycle,
    parse_function_document,
    parse_matroid_document,
    read_text,
)
from .cycles import TropicalCycle, cartesian_product, is_balanced, is_irreducible, k_skeleton, summary, weight_space
from .errors import ParseError
from .functions import divisor_power, parse_polynomial
from .intersection import diagonal_intersect, stable_intersect
from .matroids import (
    bergman_fan_normal,
    bergman_fan_rincon,
    complete_graph_matroid,
    uniform_matroid,
)
from .moduli import (
    PrueferSequence,
    curve_to_metric,
    curve_to_moduli,
    curve_to_pruefer,
    format_curve,
    local_m0n,
    m0n,
    metric_to_curve,
    moduli_to_curve,
    parse_curve,
    pruefer_to_curve,
    psi_product,
)
from .utils import configure_logging, resolve_output_path

_RE_WHOLE_SPACE = re.compile(r"R\^(\d+)")
_RE_SEPARATOR = re.compile(r"[\s,]+")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="Output format")
    common.add_argument("--json", dest="format", action="store_const", const="json", help="Alias for --format json")
    common.add_argument("-o", "--output", type=str, help="Write the result to this path")
    common.add_argument("--threads", type=int, help="Worker threads (default: TROPINTERSECT_THREADS or 1)")
    common.add_argument("--verbose", action="store_true", help="Enable debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="TropIntersect",
        description="Tropical intersection theory: cycles, divisors, intersection products, matroid fans and M0,n.",
    )
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True)
    cycle_help = "Cycle YAML file, or R^n for the whole space"

    p = sub.add_parser("balance", parents=[common], help="Check the balancing condition")
    p.add_argument("cycle", help=cycle_help)

    p = sub.add_parser("divisor", parents=[common], help="Divisor of a rational function on a cycle")
    p.add_argument("cycle", help=cycle_help)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--function", help="Tropical polynomial such as 'max(0,x,y)'")
    source.add_argument("--function-file", help="Function YAML file")
    p.add_argument("--power", type=int, default=1, help="Apply the function this many times")

    p = sub.add_parser("intersect", parents=[common], help="Intersection product of two cycles")
    p.add_argument("first", help=cycle_help)
    p.add_argument("second", help=cycle_help)
    p.add_argument("--method", choices=("stable", "diagonal"), default="stable")

    p = sub.add_parser("bergman", parents=[common], help="Bergman fan of a matroid")
    matroid = p.add_mutually_exclusive_group(required=True)
    matroid.add_argument("--matroid", help="Matroid YAML file with n and bases, or matrix")
    matroid.add_argument("--matrix", help="YAML file with a matrix (list of rows)")
    matroid.add_argument("--uniform", help="Uniform matroid 'r,n'")
    matroid.add_argument("--graphic", type=int, help="Graphic matroid of the complete graph K_k")
    p.add_argument("--method", choices=("rincon", "normalfan"), default="rincon")

    p = sub.add_parser("m0n", parents=[common], help="The moduli fan M0,n")
    p.add_argument("n", type=int)

    p = sub.add_parser("local-m0n", parents=[common], help="M0,n local at the cone of a curve")
    p.add_argument("curve", help="Curve such as '(1,2) + (1,2,3)'")
    p.add_argument("--n", type=int, required=True, help="Number of leaves")

    p = sub.add_parser("psi", parents=[common], help="Product of psi classes on M0,n")
    p.add_argument("n", type=int)
    p.add_argument("exponents", help="Comma-separated exponents k_1,...,k_n")

    p = sub.add_parser("curve", parents=[common], help="Convert between curve representations")
    p.add_argument("--n", type=int, help="Number of leaves (inferred from vectors when omitted)")
    action = p.add_mutually_exclusive_group(required=True)
    action.add_argument("--to-metric", metavar="CURVE")
    action.add_argument("--from-metric", metavar="VECTOR")
    action.add_argument("--to-pruefer", metavar="CURVE")
    action.add_argument("--from-pruefer", metavar="SEQUENCE")
    action.add_argument("--to-moduli", metavar="CURVE")
    action.add_argument("--from-moduli", metavar="VECTOR")

    p = sub.add_parser("weight-space", parents=[common], help="Weight space and irreducibility")
    p.add_argument("cycle", help=cycle_help)

    p = sub.add_parser("skeleton", parents=[common], help="k-skeleton of a cycle")
    p.add_argument("cycle", help=cycle_help)
    p.add_argument("k", type=int)

    p = sub.add_parser("product", parents=[common], help="Cartesian product of two cycles")
    p.add_argument("first", help=cycle_help)
    p.add_argument("second", help=cycle_help)

    p = sub.add_parser("summary", parents=[common], help="Dimensions, f-vector and weights")
    p.add_argument("cycle", help=cycle_help)

    p = sub.add_parser("bench", parents=[common], help="Run a timing suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--n", default="3..4", help="Values of n, e.g. '2..4' or '3,5'")
    p.add_argument("--k", default="1", help="Values of k for the divisors suite")
    p.add_argument("--terms", default="5", help="Number of terms of the random polynomials")
    p.add_argument("--uniform", action="append", help="Uniform matroid 'r,n' for the bergman suite (repeatable)")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    return parser


# --- helpers ------------------------------------------------------------------------------


def _load(spec: str) -> TropicalCycle:
    match = _RE_WHOLE_SPACE.fullmatch(spec.strip())
    if match:
        return TropicalCycle.whole_space(int(match.group(1)))
    return load_cycle(spec)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in _RE_SEPARATOR.split(text.strip()) if x]
    except ValueError as exc:
        raise ParseError(f"Expected rational numbers, got {text!r}") from exc


def _integers(text: str) -> list[int]:
    try:
        return [int(x) for x in _RE_SEPARATOR.split(text.strip().strip("()")) if x]
    except ValueError as exc:
        raise ParseError(f"Expected integers, got {text!r}") from exc


def _pair(text: str) -> tuple[int, int]:
    values = _integers(text)
    if len(values) != 2:
        raise ParseError(f"Expected 'r,n', got {text!r}")
    return values[0], values[1]


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=2) + "\n"
    lines = []
    for key, value in report.items():
        if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
            lines.append(f"{key}:")
            lines.extend("  " + " ".join(format_rational(x) for x in row) for row in value)
        elif isinstance(value, (list, tuple)):
            lines.append(f"{key}: " + " ".join(str(_jsonable(v)) for v in value))
        else:
            lines.append(f"{key}: {_jsonable(value)}")
    return "\n".join(lines) + "\n"


def _render_cycle(cycle: TropicalCycle, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(cycle_to_document(cycle), indent=2) + "\n"
    return dump_cycle(cycle)


def _emit(args: argparse.Namespace, payload: str) -> None:
    out_path = resolve_output_path(args.output)
    if out_path is None:
        print(payload, end="")
        return
    out_path.write_text(payload, encoding="utf-8")
    logging.info("Saved to %s", out_path)


# --- commands -----------------------------------------------------------------------------


def _cmd_balance(args: argparse.Namespace) -> str:
    report = is_balanced(_load(args.cycle), args.threads)
    return _render_report({"balanced": report.balanced, "offending": [repr(c) for c in report.offending]}, args.format)


def _cmd_divisor(args: argparse.Namespace) -> str:
    cycle = _load(args.cycle)
    if args.function is not None:
        function = parse_polynomial(args.function, cycle.ambient_dim)
    else:
        function = parse_function_document(read_text(args.function_file))
    return _render_cycle(divisor_power(function, args.power, cycle, args.threads), args.format)


def _cmd_intersect(args: argparse.Namespace) -> str:
    first, second = _load(args.first), _load(args.second)
    method = stable_intersect if args.method == "stable" else diagonal_intersect
    return _render_cycle(method(first, second, args.threads), args.format)


def _cmd_bergman(args: argparse.Namespace) -> str:
    if args.matroid:
        matroid = parse_matroid_document(read_text(args.matroid))
    elif args.matrix:
        matroid = parse_matroid_document(read_text(args.matrix))
        if matroid.matrix is None:
            raise ParseError("Matrix file needs a 'matrix' entry")
    elif args.uniform:
        matroid = uniform_matroid(*_pair(args.uniform))
    else:
        matroid = complete_graph_matroid(args.graphic)
    logging.info("Matroid on %d elements of rank %d", matroid.n, matroid.rank)
    method = bergman_fan_rincon if args.method == "rincon" else bergman_fan_normal
    return _render_cycle(method(matroid, args.threads), args.format)


def _cmd_curve(args: argparse.Namespace) -> str:
    if args.to_metric or args.to_pruefer or args.to_moduli:
        if args.n is None:
            raise ParseError("--n is required to read a curve")
        curve = parse_curve(args.to_metric or args.to_pruefer or args.to_moduli, args.n)
        if args.to_metric:
            values: Any = curve_to_metric(curve)
        elif args.to_moduli:
            values = curve_to_moduli(curve)
        else:
            return str(curve_to_pruefer(curve)) + "\n"
        return " ".join(format_rational(x) for x in values) + "\n"
    if args.from_pruefer:
        entries = _integers(args.from_pruefer)
        n = args.n if args.n is not None else min(entries) - 1
        return format_curve(pruefer_to_curve(PrueferSequence(n=n, entries=tuple(entries)))) + "\n"
    if args.from_metric:
        return format_curve(metric_to_curve(_rationals(args.from_metric), args.n)) + "\n"
    return format_curve(moduli_to_curve(_rationals(args.from_moduli), args.n)) + "\n"


def _cmd_weight_space(args: argparse.Namespace) -> str:
    cycle = _load(args.cycle)
    space = weight_space(cycle, args.threads)
    report = {
        "dimension": space.dimension,
        "basis": [list(v) for v in space.basis],
        "lattice_basis": [list(v) for v in space.lattice_basis],
        "irreducible": is_irreducible(cycle, args.threads),
    }
    return _render_report(report, args.format)


def _cmd_skeleton(args: argparse.Namespace) -> str:
    cycle = _load(args.cycle)
    complex_ = k_skeleton(cycle, args.k)
    cells = complex_.maximal_cells
    as_cycle = TropicalCycle.from_cells(cells, [1] * len(cells), ambient_dim=cycle.ambient_dim)
    return _render_cycle(as_cycle, args.format)


def _cmd_bench(args: argparse.Namespace) -> str:
    if args.suite == "divisors":
        rows = bench_divisors(
            parse_int_list(args.n), parse_int_list(args.k), parse_int_list(args.terms), args.repeats, args.seed
        )
    elif args.suite == "intersect":
        rows = bench_intersect(parse_int_list(args.n), parse_int_list(args.terms)[0], args.repeats, args.seed)
    elif args.suite == "bergman":
        rows = bench_bergman([_pair(u) for u in (args.uniform or ["2,4"])], args.repeats)
    else:
        rows = bench_moduli(parse_int_list(args.n), args.repeats)
    if args.format == "json":
        return json.dumps([{"suite": r.suite, **r.params, **r.timings} for r in rows], indent=2) + "\n"
    return format_table(rows)


def _dispatch(args: argparse.Namespace) -> str:
    command = args.command
    if command == "balance":
        return _cmd_balance(args)
    if command == "divisor":
        return _cmd_divisor(args)
    if command == "intersect":
        return _cmd_intersect(args)
    if command == "bergman":
        return _cmd_bergman(args)
    if command == "m0n":
        return _render_cycle(m0n(args.n, args.threads), args.format)
    if command == "local-m0n":
        return _render_cycle(local_m0n(parse_curve(args.curve, args.n), args.threads), args.format)
    if command == "psi":
        return _render_cycle(psi_product(args.n, _integers(args.exponents), args.threads), args.format)
    if command == "curve":
        return _cmd_curve(args)
    if command == "weight-space":
        return _cmd_weight_space(args)
    if command == "skeleton":
        return _cmd_skeleton(args)
    if command == "product":
        return _render_cycle(cartesian_product(_load(args.first), _load(args.second)), args.format)
    if command == "summary":
        return _render_report(summary(_load(args.cycle)), args.format)
    return _cmd_bench(args)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(verbose=args.verbose)
    try:
        payload = _dispatch(args)
    except ValueError as exc:
        logging.error("%s", exc)
        return 1
    _emit(args, payload)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Timing harness for the divisor, intersection, Bergman fan and moduli workloads.

Timings are machine-local; nothing here asserts on absolute numbers.
"""

from __future__ import annotations

import logging
import random
import timeit
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cycles import TropicalCycle, cartesian_product
from .functions import MAX, TropicalPolynomial, divisor, successive_divisors
from .intersection import stable_intersect
from .matroids import bergman_fan_normal, bergman_fan_rincon, complete_graph_matroid, tropical_linear_space, uniform_matroid
from .moduli import m0n

logger = logging.getLogger(__name__)

SUITES = ("divisors", "intersect", "bergman", "moduli")


@dataclass
class BenchRow:
    suite: str
    params: dict[str, int]
    timings: dict[str, float] = field(default_factory=dict)


def parse_int_list(text: str) -> list[int]:
    """``2..4`` or ``1,3`` or a mix such as ``1,4..6``."""
    values: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, hi = chunk.split("..", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(chunk))
    if not values:
        raise ValueError(f"No integers in {text!r}")
    return values


def random_polynomial(n: int, terms: int, rng: random.Random, spread: int = 3) -> TropicalPolynomial:
    found: dict[tuple[int, ...], Fraction] = {}
    while len(found) < terms:
        exponent = tuple(rng.randint(-spread, spread) for _ in range(n))
        found.setdefault(exponent, Fraction(rng.randint(-10, 10)))
    return TropicalPolynomial(MAX, tuple(found.items()))


def _time(func: Callable[[], object], repeats: int) -> float:
    return timeit.timeit(func, number=repeats) / repeats


def bench_divisors(
    n_values: Sequence[int], k_values: Sequence[int], term_counts: Sequence[int], repeats: int = 1, seed: int = 0
) -> list[BenchRow]:
    """Divisor of a random polynomial on L x R^{k-1} in R^n, L a tropical line."""
    rng = random.Random(seed)
    rows = []
    for n in n_values:
        for k in k_values:
            if not 1 <= k < n:
                continue
            line = tropical_linear_space(1, n - k + 1)
            x = cartesian_product(line, TropicalCycle.whole_space(k - 1)) if k > 1 else line
            for terms in term_counts:
                polynomials = [random_polynomial(n, terms, rng) for _ in range(repeats)]
                it = iter(polynomials)
                elapsed = _time(lambda: divisor(next(it), x), repeats)
                rows.append(BenchRow("divisors", {"n": n, "k": k, "terms": terms}, {"divisor": elapsed}))
                logger.debug("divisors n=%d k=%d terms=%d: %.4fs", n, k, terms, elapsed)
    return rows


def bench_intersect(n_values: Sequence[int], terms: int = 5, repeats: int = 1, seed: int = 0) -> list[BenchRow]:
    """f·(g·R^n) by successive divisors against (f·R^n)·(g·R^n) by stable intersection."""
    rng = random.Random(seed)
    rows = []
    for n in n_values:
        pairs = [(random_polynomial(n, terms, rng), random_polynomial(n, terms, rng)) for _ in range(repeats)]
        space = TropicalCycle.whole_space(n)
        first, second = iter(pairs), iter(pairs)
        successive = _time(lambda: successive_divisors(next(first), space), repeats)
        product = _time(
            lambda: stable_intersect(*(divisor(f, space) for f in next(second))), repeats
        )
        rows.append(BenchRow("intersect", {"n": n}, {"divisors": successive, "intersection": product}))
    return rows


def bench_bergman(uniform: Iterable[tuple[int, int]], repeats: int = 1) -> list[BenchRow]:
    rows = []
    for r, n in uniform:
        matroid = uniform_matroid(r, n)
        rows.append(
            BenchRow(
                "bergman",
                {"rank": r, "n": n},
                {
                    "rincon": _time(lambda: bergman_fan_rincon(matroid), repeats),
                    "normal_fan": _time(lambda: bergman_fan_normal(matroid), repeats),
                },
            )
        )
    return rows


def bench_moduli(n_values: Sequence[int], repeats: int = 1) -> list[BenchRow]:
    """M0,n as the Bergman fan of K_{n-1} against Pruefer enumeration."""
    rows = []
    for n in n_values:
        graphic = complete_graph_matroid(n - 1)
        rows.append(
            BenchRow(
                "moduli",
                {"n": n},
                {
                    "bergman": _time(lambda: bergman_fan_rincon(graphic), repeats),
                    "pruefer": _time(lambda: m0n(n), repeats),
                },
            )
        )
    return rows


def format_table(rows: Sequence[BenchRow]) -> str:
    if not rows:
        return "(no rows)\n"
    params = list(rows[0].params)
    timings = list(rows[0].timings)
    header = params + [f"{t} [s]" for t in timings]
    body = [[str(r.params[p]) for p in params] + [f"{r.timings[t]:.4f}" for t in timings] for r in rows]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in [header] + body]
    return "\n".join(lines) + "\n"

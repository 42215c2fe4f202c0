import random
from fractions import Fraction

import pytest

from TropIntersect.cycles import TropicalCycle, cycles_equal, is_balanced
from TropIntersect.errors import ParseError, SupportNotContained
from TropIntersect.functions import (
    MAX,
    MIN,
    RationalFunctionOnCycle,
    TropicalPolynomial,
    divisor,
    divisor_power,
    linear_combination,
    linearity_complex,
    parse_polynomial,
    successive_divisors,
)
from TropIntersect.polyhedra import Polyhedron


def _line() -> TropicalCycle:
    return TropicalCycle.from_fan([(1, 1), (-1, 0), (0, -1)], [[0], [1], [2]])


def test_parse_letter_and_indexed_variables():
    phi = parse_polynomial("max(3x+4, x-y-z)")
    assert phi.mode == MAX
    assert phi.n_vars == 3
    assert set(phi.terms) == {((3, 0, 0), Fraction(4)), ((1, -1, -1), Fraction(0))}

    psi = parse_polynomial("min(2x1+1/2, x2)", 3)
    assert psi.mode == MIN
    assert set(psi.terms) == {((2, 0, 0), Fraction(1, 2)), ((0, 1, 0), Fraction(0))}
    assert psi.evaluate((1, 5, 0)) == Fraction(5, 2)


def test_parse_repeated_exponent_keeps_the_winning_constant():
    assert parse_polynomial("max(x+1, x+3)").terms == (((1,), Fraction(3)),)
    assert parse_polynomial("min(x+1, x+3)").terms == (((1,), Fraction(1)),)


@pytest.mark.parametrize(
    "text",
    ["sum(x, y)", "max(x,,y)", "max(x, y", "max(x, x1)", "max(1/2x, y)", "max(x) y", "max(x $ y)"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as excinfo:
        parse_polynomial("max(x, w)")
    assert excinfo.value.position == 7


def test_too_many_variables_for_n():
    with pytest.raises(ParseError, match="variables"):
        parse_polynomial("max(x, y, z)", 2)


def test_linearity_complex_covers_the_plane():
    data = linearity_complex(parse_polynomial("max(0, x, y)"))
    assert len(data.pieces) == 3
    assert data.polytope.dim == 2
    for point in [(5, 1), (1, 5), (-3, -2)]:
        assert any(p.cell.contains(point) for p in data.pieces)


def test_divisor_of_linear_polynomial_is_standard_line():
    line = divisor(parse_polynomial("max(0, x, y)"), TropicalCycle.whole_space(2))
    assert cycles_equal(line, _line())
    assert is_balanced(line).balanced


def test_min_polynomial_gives_negative_weights():
    line = divisor(parse_polynomial("min(0, x, y)"), TropicalCycle.whole_space(2))
    assert line.weights == (-1, -1, -1)
    assert is_balanced(line).balanced


def test_self_intersection_of_line_is_a_point():
    point = divisor_power(parse_polynomial("max(0, x, y)"), 2, TropicalCycle.whole_space(2))
    assert point.cells == (Polyhedron.point((0, 0)),)
    assert point.weights == (1,)
    with pytest.raises(ValueError):
        divisor_power(parse_polynomial("max(0, x)"), -1, TropicalCycle.whole_space(1))


def test_conic_has_degree_two_on_a_line():
    conic = parse_polynomial("max(0, x+1, y+1, 2x, x+y+1, 2y)")
    points = successive_divisors([conic, parse_polynomial("max(0, x, y)")], TropicalCycle.whole_space(2))
    assert points.dim == 0
    assert sum(points.weights) == 2


def test_function_from_values_on_the_line():
    line = _line()
    function = RationalFunctionOnCycle.from_values(
        line.complex, {(0, 0): 0}, {(1, 1): 1, (-1, 0): 0, (0, -1): 0}
    )
    assert function.evaluate((3, 3)) == 3
    assert function.evaluate((-2, 0)) == 0
    with pytest.raises(SupportNotContained):
        function.evaluate((1, 0))
    point = divisor(function, line)
    assert point.cells == (Polyhedron.point((0, 0)),)
    assert point.weights == (1,)


def test_values_and_slopes_round_trip():
    function = RationalFunctionOnCycle.from_polynomial(parse_polynomial("max(0, x, y)"))
    rebuilt = RationalFunctionOnCycle.from_values(function.domain, function.vertex_values(), function.ray_slopes())
    assert rebuilt == function


def test_non_integral_slope_is_rejected():
    segment_complex = TropicalCycle.from_fan([(1,)], [[0]]).complex
    with pytest.raises(ValueError, match="non-integral"):
        RationalFunctionOnCycle.from_values(segment_complex, {(0,): 0}, {(1,): Fraction(1, 2)})


def test_linear_combination_cancels():
    phi = parse_polynomial("max(0, x, y)")
    difference = linear_combination([(1, phi), (-1, phi)])
    assert all(p.linear == (0, 0) and p.constant == 0 for p in difference.pieces)
    assert divisor(difference, TropicalCycle.whole_space(2)).is_empty


def test_polynomial_rejects_bad_mode():
    with pytest.raises(ValueError):
        TropicalPolynomial("sum", (((1,), Fraction(0)),))


def test_min_polynomial_evaluates_like_its_function():
    phi = parse_polynomial("min(x, y)", 2)
    function = RationalFunctionOnCycle.from_polynomial(phi, 2)
    for point in [(1, 2), (5, -3), (0, 0), (Fraction(1, 2), 4)]:
        assert function.evaluate(point) == phi.evaluate(point)


def test_linear_combination_with_a_min_term():
    phi = parse_polynomial("max(0, x, y)")
    psi = parse_polynomial("min(0, x, y)")
    total = linear_combination([(2, phi), (1, psi)])
    for point in [(1, 2), (-3, 1), (2, -5), (0, 0)]:
        assert total.evaluate(point) == 2 * phi.evaluate(point) + psi.evaluate(point)
    difference = linear_combination([(1, psi), (1, parse_polynomial("max(0, -x, -y)"))])
    assert divisor(difference, TropicalCycle.whole_space(2)).is_empty


def _random_polynomial(rng: random.Random, n: int, count: int = 4) -> TropicalPolynomial:
    terms = tuple(
        (tuple(rng.randint(-2, 2) for _ in range(n)), Fraction(rng.randint(-3, 3))) for _ in range(count)
    )
    return TropicalPolynomial(MAX, terms)


def test_random_divisors_are_balanced():
    rng = random.Random(1234)
    for _ in range(12):
        phi = _random_polynomial(rng, 2)
        curve = divisor(phi, TropicalCycle.whole_space(2))
        if curve.is_empty:
            continue
        assert curve.dim == 1
        assert is_balanced(curve).balanced
        assert all(w != 0 for w in curve.weights)


def test_divisors_of_two_functions_commute():
    rng = random.Random(99)
    plane = TropicalCycle.whole_space(2)
    for _ in range(8):
        phi, psi = _random_polynomial(rng, 2), _random_polynomial(rng, 2)
        assert cycles_equal(divisor(phi, divisor(psi, plane)), divisor(psi, divisor(phi, plane)))


def test_octahedron_surface_cut_by_a_second_function_is_balanced():
    surface = divisor(parse_polynomial("max(1, x, y, z, -x, -y, -z)"), TropicalCycle.whole_space(3))
    assert surface.dim == 2
    assert is_balanced(surface).balanced
    curve = divisor(parse_polynomial("max(3x+4, x-y-z, y+z+3)"), surface)
    assert curve.dim == 1
    assert is_balanced(curve).balanced

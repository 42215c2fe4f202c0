import itertools
import random
from fractions import Fraction

import pytest

from TropIntersect.errors import AmbientMismatch
from TropIntersect.polyhedra import (
    Polyhedron,
    all_faces,
    affine_image,
    faces,
    facets,
    intersect_polyhedra,
    minkowski_sum_cones,
    normal_fan,
    product,
    relative_interior_point,
    v_to_h,
    h_to_v,
    VDescription,
)


def _square() -> Polyhedron:
    return Polyhedron.from_v([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_h_and_v_descriptions_agree():
    by_v = _square()
    by_h = Polyhedron.from_h([((1, 0), 0), ((0, 1), 0), ((-1, 0), -1), ((0, -1), -1)])
    assert by_v == by_h
    assert by_v.dim == 2
    assert by_v.is_bounded
    assert len(by_v.h.inequalities) == 4


def test_redundant_generators_are_dropped():
    square = Polyhedron.from_v([(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert square == _square()
    assert len(square.v.vertices) == 4


def test_cone_with_lineality():
    cone = Polyhedron.cone([(1, 0, 0)], lineality=[(1, 1, 1)])
    assert cone.is_cone
    assert cone.dim == 2
    assert cone.contains((5, 3, 3))
    assert cone.contains((-1, -1, -1))
    assert not cone.contains((-1, 0, 0))


def test_infeasible_system_is_empty():
    empty = Polyhedron.from_h([((1,), 1), ((-1,), 0)], ambient_dim=1)
    assert empty.is_empty
    assert empty.dim == -1


def test_face_lattice_of_square():
    square = _square()
    assert len(faces(square, 0)) == 4
    assert len(facets(square)) == 4
    assert len(all_faces(square)) == 9
    edge = Polyhedron.from_v([(0, 0), (1, 0)], ambient_dim=2)
    assert edge.is_face_of(square)
    assert not Polyhedron.from_v([(0, 0), (1, 1)]).is_face_of(square)


def test_relative_interior():
    square = _square()
    point = relative_interior_point(square)
    assert square.in_relative_interior(point)
    assert not square.in_relative_interior((0, Fraction(1, 2)))
    assert square.contains((0, Fraction(1, 2)))


def test_intersection_and_ambient_check():
    square = _square()
    shifted = Polyhedron.from_v([(1, 0), (2, 0), (1, 1), (2, 1)])
    meet = intersect_polyhedra(square, shifted)
    assert meet.dim == 1
    with pytest.raises(AmbientMismatch):
        intersect_polyhedra(square, Polyhedron.point((0, 0, 0)))


def test_normal_fan_of_triangle_is_complete():
    triangle = Polyhedron.from_v([(0, 0), (1, 0), (0, 1)])
    cones = normal_fan(triangle)
    assert len(cones) == 3
    assert all(c.dim == 2 for c in cones)
    for point in [(1, 2), (-3, 1), (2, -5)]:
        assert any(c.contains(point) for c in cones)


def test_products_and_images():
    segment = Polyhedron.from_v([(0,), (1,)])
    assert product(segment, segment) == _square()
    image = affine_image(_square(), [[1, 1]], [1])
    assert image == Polyhedron.from_v([(1,), (3,)])


def test_minkowski_sum_of_cones():
    a = Polyhedron.cone([(1, 0)])
    b = Polyhedron.cone([(0, 1)])
    assert minkowski_sum_cones(a, b).dim == 2
    assert minkowski_sum_cones(a, a, negate_second=True) == Polyhedron.cone([], lineality=[(1, 0)])


def test_description_conversions_of_the_square():
    h = v_to_h(VDescription(vertices=((0, 0), (1, 0), (0, 1), (1, 1))), 2)
    assert set(h.inequalities) == {(0, 1, 0), (0, 0, 1), (1, -1, 0), (1, 0, -1)}
    assert h.equations == ()
    assert sorted(h_to_v(h, 2).vertices) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def _random_bounded_rows(rng, n, count):
    box = [(1,) + tuple(sign if i == j else 0 for j in range(n)) for i in range(n) for sign in (1, -1)]
    rows = [(rng.randint(0, 4),) + tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(count)]
    return box + [r for r in rows if any(r[1:])]


def test_random_h_to_v_to_h_round_trip_and_membership():
    rng = random.Random(17)
    for _ in range(15):
        rows = _random_bounded_rows(rng, 3, 4)
        p = Polyhedron.from_h_rows(rows, [], 3)
        if p.is_empty:
            continue
        again = Polyhedron.from_v(p.v.vertices, p.v.rays, p.v.lineality, ambient_dim=3)
        assert again == p
        assert Polyhedron.from_h_rows(p.h.inequalities, p.h.equations, 3) == p
        for _ in range(20):
            x = tuple(Fraction(rng.randint(-6, 6), 4) for _ in range(3))
            satisfied = all(r[0] + sum(c * xi for c, xi in zip(r[1:], x)) >= 0 for r in rows)
            assert p.contains(x) == satisfied


def _vertex_sets(cells):
    return {frozenset(c.v.vertices) for c in cells}


def test_face_lattice_of_the_cube_by_brute_force():
    cube = Polyhedron.from_v(list(itertools.product((0, 1), repeat=3)))
    expected = set()
    for c in itertools.product((-1, 0, 1), repeat=3):
        values = {v: sum(a * b for a, b in zip(c, v)) for v in cube.v.vertices}
        best = max(values.values())
        expected.add(frozenset(v for v, value in values.items() if value == best))
    assert _vertex_sets(all_faces(cube)) == expected
    assert [len(faces(cube, k)) for k in range(4)] == [8, 12, 6, 1]


def test_every_vertex_subset_of_a_simplex_is_a_face():
    simplex = Polyhedron.from_v([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    subsets = {
        frozenset(s) for k in range(1, 5) for s in itertools.combinations(simplex.v.vertices, k)
    }
    assert _vertex_sets(all_faces(simplex)) == subsets


def test_random_polytopes_satisfy_euler_relation():
    rng = random.Random(4)
    for _ in range(10):
        points = [tuple(rng.randint(-5, 5) for _ in range(3)) for _ in range(8)]
        p = Polyhedron.from_v(points)
        if p.dim != 3:
            continue
        f = [len(faces(p, k)) for k in range(3)]
        assert f[0] - f[1] + f[2] == 2
        for face in all_faces(p):
            assert face == p or face.is_face_of(p)


def test_normal_fan_covers_random_directions():
    rng = random.Random(8)
    points = [tuple(rng.randint(-4, 4) for _ in range(3)) for _ in range(7)]
    polytope = Polyhedron.from_v(points)
    fan = normal_fan(polytope)
    assert len(fan) == len(polytope.v.vertices)
    for _ in range(200):
        c = tuple(rng.randint(-20, 20) for _ in range(3))
        values = [sum(a * b for a, b in zip(c, v)) for v in polytope.v.vertices]
        maximizers = values.count(max(values))
        # the cone of a vertex holds exactly the directions maximized there
        assert sum(1 for cone in fan if cone.contains(c)) == maximizers

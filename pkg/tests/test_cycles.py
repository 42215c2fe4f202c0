import pytest

from TropIntersect.cycles import (
    TropicalCycle,
    cartesian_product,
    common_refinement,
    lattice_normal,
    cycles_equal,
    is_balanced,
    is_irreducible,
    k_skeleton,
    local_restriction,
    primitive_normal,
    refine_overlaps,
    star,
    summary,
    weight_cone,
    weight_space,
    affine_transform,
)
from TropIntersect.errors import NotAFace
from TropIntersect.exact_arith import canonical_lattice_basis, rank
from TropIntersect.polyhedra import Polyhedron


def _line(weights=(1, 1, 1)) -> TropicalCycle:
    return TropicalCycle.from_fan([(1, 1), (-1, 0), (0, -1)], [[0], [1], [2]], weights=weights)


def test_standard_line_is_balanced_and_irreducible():
    line = _line()
    assert line.dim == 1
    assert is_balanced(line).balanced
    assert is_irreducible(line)
    assert weight_space(line).dimension == 1
    assert weight_cone(line).dim == 1


def test_unbalanced_weights_report_the_vertex():
    report = is_balanced(_line((1, 1, 2)))
    assert not report.balanced
    assert report.offending == [Polyhedron.point((0, 0))]


def test_multiple_of_cycle_is_not_irreducible():
    assert is_balanced(_line((2, 2, 2))).balanced
    assert not is_irreducible(_line((2, 2, 2)))


def test_six_ray_curve_has_four_dimensional_weight_space():
    rays = [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)]
    curve = TropicalCycle.from_fan(rays, [[i] for i in range(6)])
    assert is_balanced(curve).balanced
    space = weight_space(curve)
    assert space.dimension == 4
    assert len(space.lattice_basis) == 4
    assert not is_irreducible(curve)


def test_primitive_normal_points_into_cell():
    tau = Polyhedron.point((0, 0))
    sigma = Polyhedron.cone([(2, 2)])
    assert primitive_normal(tau, sigma) == (1, 1)
    segment = Polyhedron.from_v([(0, 0), (3, 0)])
    assert primitive_normal(Polyhedron.point((3, 0)), segment) == (-1, 0)


def test_whole_space_and_products():
    assert is_balanced(TropicalCycle.whole_space(3)).balanced
    prism = cartesian_product(_line(), TropicalCycle.whole_space(1))
    assert prism.ambient_dim == 3
    assert prism.dim == 2
    assert is_balanced(prism).balanced


def test_skeleton_and_f_vector():
    line = _line()
    assert line.complex.f_vector() == [1, 3]
    points = k_skeleton(line, 0)
    assert points.maximal_cells == (Polyhedron.point((0, 0)),)


def test_star_and_local_restriction():
    line = _line()
    ray = Polyhedron.cone([(1, 1)])
    around_ray = star(line, ray)
    assert around_ray.dim == 1
    assert len(around_ray.cells) == 1
    local = local_restriction(line, Polyhedron.point((0, 0)))
    assert local.local_cone == Polyhedron.point((0, 0))
    assert len(local.cells) == 3
    assert is_balanced(local).balanced


def test_subdivided_cycle_is_equal():
    segment = Polyhedron.from_v([(0, 0), (1, 1)])
    tail = Polyhedron.from_v([(1, 1)], [(1, 1)])
    others = [Polyhedron.cone([(-1, 0)]), Polyhedron.cone([(0, -1)])]
    subdivided = TropicalCycle.from_cells([segment, tail] + others, [1, 1, 1, 1])
    assert cycles_equal(_line(), subdivided)
    assert not cycles_equal(_line(), _line((2, 2, 2)))


def test_overlapping_cells_add_weights():
    cells = [Polyhedron.from_v([(0,), (2,)]), Polyhedron.from_v([(1,), (3,)])]
    cycle = refine_overlaps(cells, [1, 1], 1)
    assert len(cycle.cells) == 3
    assert cycle.weight_of(Polyhedron.from_v([(1,), (2,)])) == 2
    assert cycle.weight_of(Polyhedron.from_v([(0,), (1,)])) == 1


def test_affine_transform_scales_weights_by_lattice_index():
    doubled = affine_transform(_line(), [[2, 0], [0, 2]])
    assert doubled.weights == (2, 2, 2)
    assert is_balanced(doubled).balanced


def test_summary_fields():
    info = summary(_line())
    assert info["ambient_dim"] == 2
    assert info["dim"] == 1
    assert info["maximal_cells"] == 3
    assert info["balanced"] is True
    assert info["local"] is False


def test_four_quadrants_are_balanced():
    plane = TropicalCycle.from_fan([(1, 0), (-1, 0), (0, 1), (0, -1)], [[0, 2], [2, 1], [1, 3], [3, 0]])
    assert plane.dim == 2
    assert is_balanced(plane).balanced
    assert cycles_equal(plane, TropicalCycle.whole_space(2))


def test_common_refinement_splits_a_segment():
    segment = TropicalCycle.from_cells([Polyhedron.from_v([(0,), (2,)])], [1])
    halves = TropicalCycle.from_cells([Polyhedron.from_v([(0,), (1,)]), Polyhedron.from_v([(1,), (2,)])], [1, 1])
    refined = common_refinement(segment.complex, halves.complex)
    assert set(refined.maximal_cells) == set(halves.cells)


def test_lattice_normal_of_the_diagonal_ray():
    line = _line()
    origin = Polyhedron.point((0, 0))
    sigma = next(cell for cell in line.cells if cell.contains((1, 1)))
    assert lattice_normal(line, origin, sigma).vector == (1, 1)
    with pytest.raises(NotAFace):
        lattice_normal(line, origin, Polyhedron.cone([(1, 0)]))


SIX_RAYS = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]


def _in_ray_order(cycle, vectors):
    """Reorder weight vectors so that entry j belongs to the cell through SIX_RAYS[j]."""
    position = [next(i for i, cell in enumerate(cycle.cells) if cell.contains(r)) for r in SIX_RAYS]
    return [tuple(v[i] for i in position) for v in vectors]


def test_six_ray_weight_space_matches_the_known_rows():
    curve = TropicalCycle.from_fan(SIX_RAYS, [[i] for i in range(6)])
    space = weight_space(curve)
    known = [(1, -1, 1, 0, 0, 0), (0, 0, 1, 0, 0, 1), (1, 0, 0, 1, 0, 0), (0, 1, 0, 0, 1, 0)]
    basis = _in_ray_order(curve, space.basis)
    assert rank(basis) == rank(basis + known) == 4
    lattice = _in_ray_order(curve, space.lattice_basis)
    assert canonical_lattice_basis(lattice, 6) == canonical_lattice_basis(known, 6)


def test_lattice_basis_vectors_are_balanced_weightings():
    for curve in [_line(), TropicalCycle.from_fan(SIX_RAYS, [[i] for i in range(6)])]:
        rays = [cell.v.rays[0] for cell in curve.cells]
        for w in weight_space(curve).lattice_basis:
            assert all(sum(c * r[k] for c, r in zip(w, rays)) == 0 for k in range(2))


def _subdivided_six_rays():
    cells = []
    for r in SIX_RAYS:
        far = tuple(2 * x for x in r)
        cells.append(Polyhedron.from_v([(0, 0), far]))
        cells.append(Polyhedron.from_v([far], [r]))
    return TropicalCycle.from_cells(cells, [1] * len(cells))


def test_weight_space_is_invariant_under_refinement():
    coarse = TropicalCycle.from_fan(SIX_RAYS, [[i] for i in range(6)])
    fine = _subdivided_six_rays()
    assert cycles_equal(coarse, fine)
    assert weight_space(fine).dimension == weight_space(coarse).dimension == 4
    assert len(weight_space(fine).lattice_basis) == 4


def test_cells_subdividing_one_ray_get_equal_weights():
    segment = Polyhedron.from_v([(0, 0), (1, 1)])
    tail = Polyhedron.from_v([(1, 1)], [(1, 1)])
    others = [Polyhedron.cone([(-1, 0)]), Polyhedron.cone([(0, -1)])]
    subdivided = TropicalCycle.from_cells([segment, tail] + others, [1, 1, 1, 1])
    space = weight_space(subdivided)
    assert space.dimension == weight_space(_line()).dimension == 1
    (w,) = space.lattice_basis
    cells = list(subdivided.cells)
    assert w[cells.index(segment)] == w[cells.index(tail)]
    assert {abs(x) for x in w} == {1}

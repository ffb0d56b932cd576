from fractions import Fraction

import pytest

from farkascert import config, instances, ratgeom
from farkascert.errors import DimensionMismatch, EmptyOperand, ResourceLimitExceeded
from farkascert.ratgeom import Polyhedron, vec


def interval(lo, hi):
    return Polyhedron.from_inequalities(1, [((1,), hi), ((-1,), -lo)])


def quadrant():
    return Polyhedron.from_inequalities(2, [((-1, 0), 0), ((0, -1), 0)])


def test_to_fraction_refuses_floats():
    assert ratgeom.to_fraction("3/4") == Fraction(3, 4)
    with pytest.raises(TypeError):
        ratgeom.to_fraction(0.5)


def test_convert_coordinate_cone():
    v = ratgeom.convert(quadrant(), 'V').v
    assert v.points == (vec((0, 0)),)
    assert set(v.rays) == {vec((1, 0)), vec((0, 1))}
    assert v.lineality == ()


def test_convert_interval():
    assert set(interval(-1, 1).v.points) == {vec((-1,)), vec((1,))}


def test_convert_infeasible_pair():
    p = Polyhedron.from_inequalities(1, [((1,), -1), ((-1,), -1)])
    assert p.v.points == ()
    assert p.is_empty()


def test_convert_rejects_unknown_target():
    with pytest.raises(ValueError):
        ratgeom.convert(quadrant(), 'X')


def test_round_trip_v_to_h():
    p = Polyhedron.from_generators(2, points=[(0, 0), (1, 0), (0, 1)])
    q = Polyhedron.from_h(ratgeom.convert(p, 'H').h)
    assert ratgeom.equal(p, q)
    assert ratgeom.is_irredundant(q.h)


def test_contains():
    unit = interval(0, 1)
    assert ratgeom.contains(unit, (Fraction(1, 2),))
    assert not ratgeom.contains(unit, (Fraction(3, 2),))
    assert not ratgeom.contains(ratgeom.empty(1), (0,))


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        ratgeom.contains(interval(0, 1), (0, 0))


def test_minkowski_sum():
    assert ratgeom.equal(ratgeom.minkowski_sum(interval(0, 1), interval(0, 1)), interval(0, 2))
    assert ratgeom.equal(ratgeom.minkowski_sum(ratgeom.origin(2), quadrant()), quadrant())
    e1 = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(1, 0)])
    e2 = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(0, 1)])
    assert ratgeom.equal(ratgeom.minkowski_sum(e1, e2), quadrant())


def test_minkowski_sum_of_empty_raises():
    with pytest.raises(EmptyOperand):
        ratgeom.minkowski_sum(ratgeom.empty(1), interval(0, 1))


def test_recession_cone(example1):
    assert ratgeom.equal(ratgeom.recession_cone(interval(-1, 1)), ratgeom.origin(1))
    half = Polyhedron.from_inequalities(1, [((-1,), 0)])
    assert ratgeom.equal(ratgeom.recession_cone(half), half)
    _, sigma = example1
    ray = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(1, 1)])
    assert ratgeom.equal(ratgeom.recession_cone(sigma.a), ray)


def test_polar():
    negative = Polyhedron.from_inequalities(2, [((1, 0), 0), ((0, 1), 0)])
    assert ratgeom.equal(ratgeom.polar(quadrant()), negative)
    assert ratgeom.equal(ratgeom.polar(ratgeom.origin(2)), ratgeom.whole_space(2))
    ray = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(1, 1)])
    assert ratgeom.equal(ratgeom.polar(ray), Polyhedron.from_inequalities(2, [((1, 1), 0)]))


def test_closed_conic_hull():
    p = Polyhedron.from_generators(2, points=[(1, 0)], rays=[(0, 1)])
    assert ratgeom.equal(ratgeom.closed_conic_hull(p), quadrant())
    assert ratgeom.equal(ratgeom.closed_conic_hull(quadrant()), quadrant())


def test_project():
    k = Polyhedron.from_inequalities(3, [((1, 1, 0), 0), ((0, 1, -1), 0)])
    assert ratgeom.equal(ratgeom.project(k, [0, 1]), Polyhedron.from_inequalities(2, [((1, 1), 0)]))
    segment = Polyhedron.from_generators(2, points=[(0, 0), (1, 1)])
    assert ratgeom.equal(ratgeom.project(segment, [0]), interval(0, 1))
    assert ratgeom.equal(ratgeom.project(ratgeom.origin(3), [2]), ratgeom.origin(1))


def test_equal():
    v_quadrant = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(1, 0), (0, 1)])
    assert ratgeom.equal(quadrant(), v_quadrant)
    assert not ratgeom.equal(interval(0, 1), interval(0, 2))
    assert ratgeom.subset(interval(0, 1), interval(0, 2))


def test_intersect_product_cylinder():
    square = ratgeom.product(interval(0, 1), interval(0, 1))
    assert ratgeom.contains(square, (1, 1))
    assert not ratgeom.contains(square, (2, 0))
    strip = ratgeom.cylinder(interval(0, 1), 1)
    assert ratgeom.contains(strip, (0, 100))
    assert ratgeom.equal(ratgeom.intersect(strip, ratgeom.cylinder(interval(0, 1), 1)), strip)
    assert ratgeom.intersect(interval(0, 1), interval(2, 3)).is_empty()


def test_preimage_and_substitute():
    square = ratgeom.product(interval(0, 1), interval(0, 2))
    assert ratgeom.equal(ratgeom.substitute(square, 0, Fraction(1, 2)), interval(0, 2))
    assert ratgeom.substitute(square, 0, 5).is_empty()
    doubled = ratgeom.preimage(interval(0, 2), [(2,)], (0,))
    assert ratgeom.equal(doubled, interval(0, 1))


def test_primitive_and_canonical_line():
    assert ratgeom.primitive((Fraction(1, 2), Fraction(3, 4))) == vec((2, 3))
    assert ratgeom.canonical_line((0, -2, 4)) == vec((0, 1, -2))


def test_generator_cap():
    with config.override(max_generators=1):
        with pytest.raises(ResourceLimitExceeded):
            quadrant().v


def random_triple(seed, n=2):
    rng = instances.rng_for(seed, 31)
    around = instances.random_vector(rng, n)
    return [instances.random_polyhedron(rng, n, around, bounded=bool(k % 2)) for k in range(3)]


@pytest.mark.parametrize('seed', range(10))
def test_round_trip_on_random_polyhedra(seed):
    for p in random_triple(seed):
        from_v = Polyhedron.from_v(p.v)
        assert ratgeom.equal(from_v, p)
        assert ratgeom.equal(Polyhedron.from_h(from_v.h), p)
        assert ratgeom.equal(ratgeom.convert(p, 'H'), ratgeom.convert(p, 'V'))


@pytest.mark.parametrize('seed', range(10))
def test_double_polar_of_random_cones(seed):
    for p in random_triple(seed):
        cone = ratgeom.closed_conic_hull(p)
        assert ratgeom.equal(ratgeom.polar(ratgeom.polar(cone)), cone)


@pytest.mark.parametrize('seed', range(10))
def test_recession_cone_of_intersection(seed):
    p, q, _ = random_triple(seed)
    both = ratgeom.intersect(p, q)
    expected = ratgeom.intersect(ratgeom.recession_cone(p), ratgeom.recession_cone(q))
    assert ratgeom.equal(ratgeom.recession_cone(both), expected)
    for r in both.v.rays:
        assert ratgeom.contains_direction(p, r) and ratgeom.contains_direction(q, r)


@pytest.mark.parametrize('seed', range(10))
def test_minkowski_sum_is_commutative_and_associative(seed):
    p, q, r = random_triple(seed)
    assert ratgeom.equal(ratgeom.minkowski_sum(p, q), ratgeom.minkowski_sum(q, p))
    left = ratgeom.minkowski_sum(ratgeom.minkowski_sum(p, q), r)
    right = ratgeom.minkowski_sum(p, ratgeom.minkowski_sum(q, r))
    assert ratgeom.equal(left, right)


@pytest.mark.parametrize('seed', range(10))
def test_closed_conic_hull_contains_positive_scalings(seed):
    for p in random_triple(seed):
        cone = ratgeom.closed_conic_hull(p)
        assert ratgeom.subset(p, cone)
        for x in p.v.points:
            for t in (Fraction(1, 3), 1, 5):
                assert ratgeom.contains(cone, ratgeom.scale(t, x))
        for d in p.v.rays:
            assert ratgeom.contains_direction(cone, d)


def test_contains_direction():
    assert ratgeom.contains_direction(quadrant(), (1, 2))
    assert not ratgeom.contains_direction(quadrant(), (1, -1))
    assert not ratgeom.contains_direction(interval(0, 1), (1,))

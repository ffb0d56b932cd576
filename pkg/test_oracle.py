import math
from fractions import Fraction

import pytest

from farkascert import convexfn, farkas, instances, oracle, ratgeom
from farkascert.errors import InconsistentSystem
from farkascert.ratgeom import Polyhedron, vec


def test_sample_feasible_example1(example1):
    _, sigma = example1
    cloud = oracle.sample_feasible(sigma, 5, seed=42)
    assert len(cloud) == 5
    for x in cloud.points:
        assert x[1] == x[0] + 1 and x[0] >= 0
    assert cloud.points[0] == vec((0, 1))


def test_sample_feasible_is_deterministic(example1):
    _, sigma = example1
    first = oracle.sample_feasible(sigma, 20, seed=3)
    second = oracle.sample_feasible(sigma, 20, seed=3)
    assert first.points == second.points


def test_sample_feasible_in_box():
    box = Polyhedron.from_inequalities(2, [((1, 0), 1), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)])
    sigma = farkas.ConvexSystem(2, box)
    cloud = oracle.sample_feasible(sigma, 30, seed=1)
    assert all(0 <= c <= 1 for x in cloud.points for c in x)


def test_sample_feasible_inconsistent(infeasible_pair):
    _, sigma = infeasible_pair
    with pytest.raises(InconsistentSystem):
        oracle.sample_feasible(sigma, 5, seed=0)


def test_oracle_finds_violation(halfline):
    f, sigma = halfline
    cloud = oracle.sample_feasible(sigma, 10, seed=0)
    verdict = oracle.oracle_consequence(f, (0,), Fraction(-1, 2), sigma, cloud)
    assert verdict.status == oracle.VIOLATION
    assert f(verdict.x) < Fraction(-1, 2)


def test_oracle_no_violation_for_certified_query(halfline):
    f, sigma = halfline
    cloud = oracle.sample_feasible(sigma, 200, seed=5)
    assert oracle.oracle_consequence(f, (0,), -1, sigma, cloud).status == oracle.NO_VIOLATION


def test_oracle_vacuous_case(example1):
    f, sigma = example1
    cloud = oracle.sample_feasible(sigma, 50, seed=9)
    assert oracle.oracle_consequence(f, (0, 0), 100, sigma, cloud).status == oracle.NO_VIOLATION


def test_oracle_conjugate_absolute_value():
    f = convexfn.max_affine([((1,), 0), ((-1,), 0)])
    cloud = oracle.box_grid(1, 1)
    grid = oracle.SampleCloud(0, ((Fraction(1, 2),),), 'dual')
    estimates = oracle.oracle_conjugate(f, grid, cloud)
    assert estimates[(Fraction(1, 2),)].value == 0
    assert convexfn.evaluate(convexfn.conjugate(f), (Fraction(1, 2),)) == 0


def test_oracle_conjugate_example1(example1):
    f, _ = example1
    cloud = oracle.sample_domain(f, 20, seed=2)
    grid = oracle.SampleCloud(0, (vec((-1, 0)), vec((1, 1))), 'dual')
    estimates = oracle.oracle_conjugate(f, grid, cloud)
    assert estimates[vec((-1, 0))].value == 0
    assert not estimates[vec((-1, 0))].unbounded
    assert estimates[vec((1, 1))].unbounded
    assert convexfn.evaluate(convexfn.conjugate(f), (1, 1)) == math.inf


def test_oracle_conjugate_never_exceeds_exact(rng):
    f = instances.random_function(rng, 2)
    cloud = oracle.box_grid(2, 2)
    grid = oracle.box_grid(2, 2)
    exact = convexfn.conjugate(f)
    for y, estimate in oracle.oracle_conjugate(f, grid, cloud).items():
        assert estimate.value <= convexfn.evaluate(exact, y)


def test_box_grid_size():
    grid = oracle.box_grid(2, 1, denominator=2)
    assert len(grid) == 25
    assert ratgeom.vec((Fraction(-1, 2), 1)) in grid.points

import math

import pytest

from farkascert import config, convexfn, farkas, instances, optimal
from farkascert.errors import PointNotFeasible
from farkascert.optimal import KktCertificate, PerturbedProblem
from farkascert.ratgeom import vec


@pytest.fixture
def kkt_abs():
    return instances.kkt_abs()


def halfline_problem(halfline):
    f, sigma = halfline
    return PerturbedProblem(sigma, f, (0,))


def test_is_optimal(halfline):
    p = halfline_problem(halfline)
    assert optimal.is_optimal(p, (1,))
    assert not optimal.is_optimal(p, (0,))


def test_every_feasible_point_is_optimal_for_zero(example1):
    _, sigma = example1
    p = PerturbedProblem(sigma, convexfn.zero(2), (0, 0))
    assert optimal.is_optimal(p, (0, 1))
    assert optimal.is_optimal(p, (3, 4))


def test_is_optimal_rejects_infeasible_point(halfline):
    with pytest.raises(PointNotFeasible):
        optimal.is_optimal(halfline_problem(halfline), (2,))


def test_solve_direct(halfline, example1):
    direct = optimal.solve_direct(halfline_problem(halfline))
    assert direct.status == 'Optimal'
    assert direct.value == -1
    assert direct.x == vec((1,))
    f, sigma = example1
    assert optimal.solve_direct(PerturbedProblem(sigma, f, (0, 0))).value == math.inf


def test_kkt_find_abs(kkt_abs):
    p, x_bar = kkt_abs
    cert = optimal.kkt_find(p, x_bar)
    assert cert.J == ('f1',)
    assert cert.lambdas == {'f1': 1}
    assert cert.u_star == vec((-1, 0))
    assert cert.u_j['f1'] == vec((1, 0))
    assert cert.v_star == vec((0, 0))
    assert cert.hypothesis_verified
    assert optimal.kkt_verify(p, x_bar, cert)
    assert optimal.sum_rule_contains(p, x_bar, cert.lambdas)


def test_kkt_find_at_non_optimal_point(kkt_abs):
    p, _ = kkt_abs
    assert optimal.kkt_find(p, (0, 0)) is None


def test_kkt_with_no_active_constraints(halfline):
    _, sigma = halfline
    p = PerturbedProblem(sigma, convexfn.zero(1), (0,))
    cert = optimal.kkt_find(p, (0,))
    assert cert.J == ()
    assert cert.u_star == vec((0,))
    assert cert.v_star == vec((0,))


def test_kkt_verify_rejects_tampering(kkt_abs):
    p, x_bar = kkt_abs
    cert = optimal.kkt_find(p, x_bar)
    doubled = KktCertificate({'f1': 2}, cert.u_star, cert.v_star, cert.u_j)
    assert not optimal.kkt_verify(p, x_bar, doubled)
    slack_point = vec((0, 0))
    stationary = KktCertificate({'f1': 1}, vec((-1, 0)), vec((0, 0)), {'f1': vec((1, 0))})
    assert not optimal.kkt_verify(p, slack_point, stationary)


def test_kkt_reports_unverified_hypothesis(not_fm):
    g, sigma = not_fm
    p = PerturbedProblem(sigma, g, (0, 0))
    closedness = farkas.closedness_of_sum(g, sigma)
    cert = optimal.kkt_find(p, (-1, 0), closedness)
    assert cert is not None
    assert not cert.hypothesis_verified


@pytest.mark.slow
def test_is_optimal_agrees_with_direct_solution():
    for k in range(100):
        rng = instances.rng_for(config.Settings.seed, 700 + k)
        sigma, x0 = instances.random_consistent_system(rng, 2, 1 + k % 2)
        f = instances.random_function(rng, 2)
        p = PerturbedProblem(sigma, f, instances.random_vector(rng, 2, -1, 1))
        direct = optimal.solve_direct(p)
        if direct.status != 'Optimal':
            continue
        assert optimal.is_optimal(p, direct.x)
        if p.objective_value(x0) > direct.value:
            assert not optimal.is_optimal(p, x0)
        cert = optimal.kkt_find(p, direct.x)
        if cert is not None:
            assert optimal.kkt_verify(p, direct.x, cert)

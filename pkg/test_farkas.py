from fractions import Fraction

import pytest

from farkascert import config, convexfn, farkas, instances, oracle, ratgeom, selftest
from farkascert.errors import CertificateError, HiddenAssumptionFails, InconsistentSystem, PremiseViolated
from farkascert.ratgeom import Polyhedron, vec


def empty_system(n):
    return farkas.ConvexSystem(n)


def test_characteristic_cone_example1(example1):
    _, sigma = example1
    expected = Polyhedron.from_inequalities(3, [((1, 1, 0), 0), ((0, 1, -1), 0)])
    assert ratgeom.equal(farkas.characteristic_cone(sigma).closure, expected)


def test_characteristic_cone_without_constraints():
    vertical = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(0, 1)])
    assert ratgeom.equal(farkas.characteristic_cone(empty_system(1)).closure, vertical)


def test_characteristic_cone_of_single_affine_constraint():
    sigma = farkas.ConvexSystem(1, constraints=[('f1', convexfn.affine((1,), 0))])
    expected = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(1, 0), (0, 1)])
    assert ratgeom.equal(sigma.cone.closure, expected)


def test_system_rejects_duplicate_names():
    g = convexfn.affine((1,), 0)
    with pytest.raises(ValueError):
        farkas.ConvexSystem(1, constraints=[('f1', g), ('f1', g)])


@pytest.mark.parametrize('alpha', [-1, 0, 1])
def test_member_closure_example1(example1, alpha):
    f, sigma = example1
    assert not farkas.member_closure((0, 0, -alpha), f, sigma)


def test_member_closure_trivial_system():
    sigma = empty_system(1)
    f = convexfn.zero(1)
    assert farkas.member_closure((0, 1), f, sigma)
    assert not farkas.member_closure((0, -1), f, sigma)


def test_member_exact_gap_on_not_fm(not_fm):
    _, sigma = not_fm
    f = convexfn.zero(2)
    assert farkas.member_closure((0, 1, 0), f, sigma)
    assert farkas.member_exact((0, 1, 0), f, sigma) is None


def test_member_exact_example1(example1):
    f, sigma = example1
    q = (-1, -1, 10)
    assert farkas.member_closure(q, f, sigma)
    dec = farkas.member_exact(q, f, sigma)
    assert dec is not None
    assert dec.total(3) == vec(q)
    assert all(lam > 0 for lam in dec.multipliers.values())


def test_member_exact_at_origin(example1):
    f, sigma = example1
    assert farkas.member_exact((0, 0, 0), None, sigma) is not None


def test_vacuous_consequence(example1):
    f, sigma = example1
    for s in (-1, 0, 5):
        verdict = farkas.check_consequence(f, (0, 0), s, sigma)
        assert verdict.status == farkas.VACUOUS
        assert verdict.diagnosis == {'hidden_assumption': farkas.FAILS, 'system': farkas.CONSISTENT}
        assert verdict.is_consequence


def test_certified_consequence(halfline):
    f, sigma = halfline
    verdict = farkas.check_consequence(f, (0,), -1, sigma)
    assert verdict.status == farkas.CERTIFIED
    cert = verdict.certificate
    assert cert.J == ('f1',)
    assert cert.lambdas['f1'] == 1
    assert cert.u_star == vec((-1,))
    assert cert.u_star_value == 0
    assert cert.u_j['f1'] == vec((1,))
    assert cert.u_j_values['f1'] == 1
    assert farkas.verify_certificate(cert, f, (0,), -1, sigma)
    assert farkas.lagrangian_bound(cert, f, (0,), sigma) >= -1


def test_not_consequence(halfline):
    f, sigma = halfline
    verdict = farkas.check_consequence(f, (0,), Fraction(-1, 2), sigma)
    assert verdict.status == farkas.NOT_CONSEQUENCE
    assert verdict.witness == vec((1,))
    assert farkas.find_violation(f, (0,), Fraction(-1, 2), sigma) == vec((1,))
    assert farkas.find_violation(f, (0,), -1, sigma) is None


def test_unbounded_violation():
    sigma = empty_system(1)
    x = farkas.find_violation(convexfn.zero(1), (1,), 0, sigma)
    assert x[0] > 0


def test_find_violation_requires_hidden_assumption(example1):
    f, sigma = example1
    with pytest.raises(HiddenAssumptionFails):
        farkas.find_violation(f, (0, 0), 0, sigma)


def test_tampered_certificate_is_rejected(halfline):
    f, sigma = halfline
    cert = farkas.check_consequence(f, (0,), -1, sigma).certificate
    with pytest.raises(CertificateError):
        farkas.FarkasCertificate(
            x_star=cert.x_star, s=cert.s, u_star=cert.u_star, u_star_value=cert.u_star_value,
            v_star=cert.v_star, v_star_value=cert.v_star_value,
            lambdas={'f1': Fraction(2)}, u_j=cert.u_j, u_j_values=cert.u_j_values,
        )
    assert not farkas.verify_certificate(cert, f, (0,), Fraction(-1, 2), sigma)


def test_hidden_assumption(example1, infeasible_pair):
    f, sigma = example1
    assert farkas.hidden_assumption(f, sigma).status == farkas.FAILS
    held = farkas.hidden_assumption(convexfn.zero(2), sigma)
    assert held.holds
    assert ratgeom.contains(sigma.a, held.witness)
    g, bad = infeasible_pair
    assert not farkas.hidden_assumption(g, bad).holds


def test_consequence_at_zero(halfline):
    f, sigma = halfline
    assert farkas.consequence_at_zero(f, -1, sigma).status == farkas.CERTIFIED


def test_cone_identity(example1, not_fm):
    f, sigma = example1
    assert farkas.verify_cone_identity(f, sigma)
    assert not farkas.verify_cone_identity(convexfn.zero(2), sigma)
    g, nc = not_fm
    assert not farkas.verify_cone_identity(g, nc)


def test_recession_witness(example1):
    f, sigma = example1
    d = farkas.recession_witness(f, sigma, (0, 0))
    assert ratgeom.primitive(d) == vec((1, 1))
    assert farkas.recession_witness(f, sigma, (0, -2)) is None


def test_recession_witness_needs_failing_hidden_assumption(halfline):
    f, sigma = halfline
    with pytest.raises(PremiseViolated):
        farkas.recession_witness(f, sigma, (0,))


def test_recession_conditions_agree(example1):
    f, sigma = example1
    for x_star in [(0, 0), (0, -2), (1, 1), (-3, 1)]:
        conditions = farkas.recession_conditions(f, sigma, x_star)
        assert conditions.agree


def test_farkas_minkowski(example1, not_fm):
    _, sigma = example1
    assert farkas.is_farkas_minkowski(sigma).holds
    assert farkas.is_farkas_minkowski(empty_system(3)).holds
    _, nc = not_fm
    fm = farkas.is_farkas_minkowski(nc)
    assert fm.status == farkas.NOT_FM
    assert ratgeom.canonical_line(fm.offending_ray) == vec((0, 1, 0))


def test_farkas_minkowski_needs_solutions(infeasible_pair):
    _, sigma = infeasible_pair
    assert not farkas.is_farkas_minkowski(sigma).holds


def test_asymptotic_consequence(not_fm):
    f, sigma = not_fm
    verdict = farkas.check_consequence(f, (0, 1), 0, sigma)
    assert verdict.status == farkas.ASYMPTOTIC
    assert verdict.certificate is None


def test_inconsistent_pair(infeasible_pair):
    _, sigma = infeasible_pair
    result = farkas.is_consistent(sigma, diagnostics=True)
    assert result.status == farkas.INCONSISTENT
    dec = result.certificate
    assert dec is not None
    total = dec.system_part
    for w, _ in dec.cone_parts.values():
        total = ratgeom.add(total, w)
    assert total == vec((0, -1))
    assert result.existence.barrier_sum_cylinder
    assert result.existence.dual_point_outside is False


def test_consistent_systems(example1):
    _, sigma = example1
    result = farkas.is_consistent(sigma)
    assert result.consistent
    assert ratgeom.contains(sigma.a, result.witness)
    assert farkas.is_consistent(empty_system(2)).consistent


def test_epi_delta_a(example1, not_fm, infeasible_pair):
    _, sigma = example1
    expected = Polyhedron.from_inequalities(3, [((1, 1, 0), 0), ((0, 1, -1), 0)])
    assert ratgeom.equal(farkas.epi_delta_A(sigma), expected)
    vertical = Polyhedron.from_generators(2, points=[(0, 0)], rays=[(0, 1)])
    assert ratgeom.equal(farkas.epi_delta_A(empty_system(1)), vertical)
    _, nc = not_fm
    assert ratgeom.equal(farkas.epi_delta_A(nc), farkas.support_epigraph_of_solutions(nc))
    _, bad = infeasible_pair
    with pytest.raises(InconsistentSystem):
        farkas.epi_delta_A(bad)


def test_closedness_routes(halfline, not_fm):
    f, sigma = halfline
    closed = farkas.closedness_of_sum(f, sigma)
    assert closed.closed is True
    assert closed.route == 'continuity'
    g, nc = not_fm
    result = farkas.closedness_of_sum(g, nc)
    assert result.closed is False
    assert result.route == 'generators'


def test_forward_certificates_are_found(rng):
    for _ in range(4):
        fc = instances.forward_certificate(rng, 2, 2)
        verdict = farkas.check_consequence(fc.f, fc.x_star, fc.s, fc.sigma)
        assert verdict.status == farkas.CERTIFIED
        cloud = oracle.sample_feasible(fc.sigma, 50, 7)
        assert oracle.oracle_consequence(fc.f, fc.x_star, fc.s, fc.sigma, cloud).status == oracle.NO_VIOLATION


def test_existence_report_for_consistent_system(example1):
    _, sigma = example1
    report = farkas.existence_conditions(sigma)
    assert report.consistent
    assert report.dual_point_outside
    assert not report.barrier_sum_cylinder


@pytest.mark.slow
def test_cone_identity_tracks_hidden_assumption_corpus():
    for k in range(100):
        rng = instances.rng_for(config.Settings.seed, 600 + k)
        fails = bool(k % 2)
        f, sigma = instances.random_hidden_pair(rng, 2, 1 + k % 2, fails)
        assert farkas.hidden_assumption(f, sigma).holds != fails
        assert farkas.verify_cone_identity(f, sigma) == fails


@pytest.mark.slow
def test_consistency_routes_corpus():
    for k in range(100):
        rng = instances.rng_for(config.Settings.seed, 800 + k)
        if k < 25:
            sigma = instances.random_inconsistent_system(rng, 2, 3)
            assert farkas.is_consistent(sigma, diagnostics=True).status == farkas.INCONSISTENT
        else:
            sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
            assert farkas.is_consistent(sigma, diagnostics=True).status == farkas.CONSISTENT


def test_constraint_cone_hull_is_support_of_b(rng):
    for k in range(5):
        sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
        conjugates = [convexfn.conjugate(g) for _, g in sigma.constraints]
        hull = ratgeom.minkowski_sum_all([ratgeom.closed_conic_hull(g.epi) for g in conjugates], 3)
        support_b = convexfn.conjugate(convexfn.indicator(sigma.b)).epi
        assert ratgeom.equal(hull, support_b)
        barrier = ratgeom.minkowski_sum_all([ratgeom.closed_conic_hull(convexfn.domain(g)) for g in conjugates], 2)
        assert ratgeom.equal(ratgeom.project(support_b, range(2)), barrier)


def test_closure_is_support_of_solution_set(rng):
    for k in range(5):
        sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
        assert ratgeom.equal(sigma.cone.closure, convexfn.conjugate(convexfn.indicator(sigma.a)).epi)


def test_exact_membership_matches_closure_on_fm_systems(rng):
    checked = 0
    for _ in range(10):
        fc = instances.forward_certificate(rng, 2, 2)
        if not farkas.is_farkas_minkowski(fc.sigma).holds:
            continue
        checked += 1
        inside = fc.x_star + (-fc.s,)
        for q in (inside, ratgeom.add(inside, (0, 0, -2)), instances.random_vector(rng, 3)):
            assert (farkas.member_exact(q, fc.f, fc.sigma) is not None) == farkas.member_closure(q, fc.f, fc.sigma)
    assert checked


def test_scaling_the_query_keeps_the_verdict(halfline):
    f, sigma = halfline
    for s in (-1, 0):
        verdict = farkas.check_consequence(f, (0,), s, sigma)
        scaled_f = convexfn.nonnegative_combination([(3, f)], 1)
        assert farkas.check_consequence(scaled_f, (0,), 3 * s, sigma).status == verdict.status


def test_not_consequence_witness_survives_direct_evaluation(halfline):
    f, sigma = halfline
    verdict = farkas.check_consequence(f, (0,), 0, sigma)
    assert verdict.status == farkas.NOT_CONSEQUENCE
    cloud = oracle.sample_feasible(sigma, 20, 3)
    assert selftest.verdict_contradiction(verdict, f, sigma, cloud) is None


def test_verdicts_never_contradict_sampling(rng):
    statuses = set()
    for k in range(4):
        fc = instances.forward_certificate(rng, 2, 2)
        cloud = oracle.sample_feasible(fc.sigma, 50, k)
        for gap in (0, 1, 3):
            verdict = farkas.check_consequence(fc.f, fc.x_star, fc.s + gap, fc.sigma)
            statuses.add(verdict.status)
            assert selftest.verdict_contradiction(verdict, fc.f, fc.sigma, cloud) is None
    assert farkas.CERTIFIED in statuses


@pytest.mark.slow
@pytest.mark.parametrize('corpus', [
    'invariant.constraint_cone_hull',
    'invariant.closure_is_support_epigraph',
    'invariant.closure_of_sum',
    'invariant.exact_matches_closure',
    'invariant.forward_certificates',
])
def test_acceptance_corpora(corpus):
    check = selftest.SelfTest(full=True).run_corpus(corpus)
    assert check.passed, check.detail

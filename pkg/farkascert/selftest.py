"""
Regression suite run by ``farkascert selftest``.

The golden checks compare Example 1 values exactly against
goldens/example1.json. The invariant checks run seeded random corpora; the
default size keeps a run short, ``full`` uses the acceptance sizes.
"""

import dataclasses
import json
import logging
import math
from fractions import Fraction
from pathlib import Path

from farkascert import config, convexfn, farkas, instances, optimal, oracle, ratgeom
from farkascert.errors import FarkasError, ProblemFileError
from farkascert.report import parse_value, parse_vec
from farkascert.ratgeom import HRep, Polyhedron, VRep

logger = logging.getLogger(__name__)

GOLDEN_PATH = Path(__file__).parent / 'goldens' / 'example1.json'

QUICK_SIZE = 8
FULL_SIZE = 100

PERSPECTIVE_LEVELS = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1))


def perspective_formula(f, x, r):
    """-r f(-x/r) for r < 0, the support of dom f* at x for r = 0, +inf for r > 0"""
    if r > 0:
        return math.inf
    if r == 0:
        return convexfn.support_eval(convexfn.domain(convexfn.conjugate(f)), x)
    return -r * convexfn.evaluate(f, ratgeom.scale(-1 / r, x))


def verdict_contradiction(verdict, f, sigma, cloud):
    """A message when sampling refutes a consequence verdict, None otherwise"""
    if verdict.status == farkas.NOT_CONSEQUENCE:
        w = verdict.witness
        if not oracle.is_feasible(sigma, w):
            return f"violation witness {ratgeom.fmt(w)} is not a solution"
        if convexfn.evaluate(f, w) - ratgeom.dot(verdict.x_star, w) >= verdict.s:
            return f"violation witness {ratgeom.fmt(w)} satisfies the inequality"
        return None
    if verdict.status in (farkas.CERTIFIED, farkas.ASYMPTOTIC):
        found = oracle.oracle_consequence(f, verdict.x_star, verdict.s, sigma, cloud)
        if found.status != oracle.NO_VIOLATION:
            return f"{verdict.status} but the oracle found a violation at {ratgeom.fmt(found.x)}"
    return None


@dataclasses.dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ''

    def as_dict(self):
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


def load_golden(path=GOLDEN_PATH):
    try:
        with open(path, encoding='utf-8') as fh:
            return json.load(fh)
    except OSError as e:
        raise ProblemFileError(str(path), f"cannot read golden file: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ProblemFileError(str(path), f"invalid JSON: {e}") from e


def _golden_set(block, path, dim):
    rows = []
    for k, row in enumerate(block.get('inequalities', [])):
        rows.append((parse_vec(row['a'], f"{path}.inequalities[{k}].a"), parse_value(row['b'], f"{path}.inequalities[{k}].b")))
    eqs = []
    for k, row in enumerate(block.get('equalities', [])):
        eqs.append((parse_vec(row['a'], f"{path}.equalities[{k}].a"), parse_value(row['b'], f"{path}.equalities[{k}].b")))
    return Polyhedron.from_h(HRep.build(dim, rows, eqs))


class SelfTest:
    """Collects Check results; a check that raises counts as failed with the error as detail"""

    def __init__(self, seed=None, full=False, golden_path=GOLDEN_PATH):
        settings = config.current()
        self.seed = settings.seed if seed is None else seed
        self.size = FULL_SIZE if full else QUICK_SIZE
        self.samples = settings.sample_count * (50 if full else 1)
        self.golden_path = golden_path
        self.checks = []

    def record(self, name, passed, detail=''):
        check = Check(name, bool(passed), detail)
        self.checks.append(check)
        if not check.passed:
            logger.warning(f"Selftest check failed: {name} {detail}".rstrip())
        return check

    def guarded(self, name, fn):
        try:
            passed, detail = fn()
        except (FarkasError, KeyError, TypeError, ValueError) as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        return self.record(name, passed, detail)

    @property
    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)

    @property
    def passed(self):
        return self.first_failure is None

    def run(self):
        logger.info(f"Selftest started with seed {self.seed}, corpus size {self.size}")
        self.golden_checks()
        self.invariant_checks()
        logger.info(f"Selftest finished: {sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return self.checks

    def summary(self):
        return {
            'seed': self.seed,
            'corpus_size': self.size,
            'passed': self.passed,
            'first_failure': None if self.passed else self.first_failure.name,
            'checks': [c.as_dict() for c in self.checks],
        }

    # -- Example 1 goldens ---------------------------------------------------

    def golden_checks(self):
        try:
            golden = load_golden(self.golden_path)
        except ProblemFileError as e:
            self.record('golden.file', False, str(e))
            return
        f, sigma = instances.example1()

        def solution_set():
            block = golden['solution_set']
            expected = Polyhedron.from_v(VRep.build(
                2,
                [parse_vec(p, 'solution_set.points') for p in block['points']],
                [parse_vec(r, 'solution_set.rays') for r in block['rays']],
                [parse_vec(l, 'solution_set.lineality') for l in block['lineality']],
            ))
            return ratgeom.equal(sigma.a, expected), ""

        def hidden():
            status = farkas.hidden_assumption(f, sigma).status
            return status == golden['hidden_assumption'], status

        def fm():
            status = farkas.is_farkas_minkowski(sigma).status
            return status == golden['fm'], status

        def closure():
            expected = _golden_set(golden['closure_of_K'], 'closure_of_K', 3)
            return ratgeom.equal(sigma.cone.closure, expected), ""

        def support(key, polyhedron):
            def check():
                block = golden[key]
                value = convexfn.support_eval(polyhedron, parse_vec(block['direction'], f"{key}.direction"))
                return value == parse_value(block['value'], f"{key}.value"), str(value)
            return check

        def witness():
            d = farkas.recession_witness(f, sigma, ratgeom.zeros(2))
            if d is None:
                return False, 'no witness'
            expected = parse_vec(golden['recession_witness'], 'recession_witness')
            return ratgeom.primitive(d) == ratgeom.primitive(expected), ratgeom.fmt(d)

        def consequence():
            status = farkas.consequence_at_zero(f, 0, sigma).status
            return status == golden['consequence_at_zero'], status

        self.guarded('golden.solution_set', solution_set)
        self.guarded('golden.hidden_assumption', hidden)
        self.guarded('golden.fm', fm)
        self.guarded('golden.closure_of_K', closure)
        for k, entry in enumerate(golden.get('member_closure', [])):
            def member(entry=entry, k=k):
                alpha = parse_value(entry['alpha'], f"member_closure[{k}].alpha")
                got = farkas.member_closure((0, 0, -alpha), f, sigma)
                return got == entry['member'], str(got)
            self.guarded(f"golden.member_closure[alpha={entry.get('alpha')}]", member)
        self.guarded('golden.support_conjugate_epigraph',
                     support('support_conjugate_epigraph', convexfn.conjugate(f).epi))
        self.guarded('golden.support_K', support('support_K', sigma.cone.closure))
        self.guarded('golden.recession_witness', witness)
        self.guarded('golden.consequence_at_zero', consequence)

    # -- Randomized invariants -------------------------------------------------

    # (check name, rng stream, method)
    CORPORA = (
        ('invariant.biconjugate', 1, '_biconjugate'),
        ('invariant.conjugate_of_restriction', 2, '_restriction'),
        ('invariant.closure_is_support_epigraph', 3, '_closure_is_support'),
        ('invariant.closure_of_sum', 4, '_closure_of_sum'),
        ('invariant.forward_certificates', 5, '_forward'),
        ('invariant.hidden_assumption_identity', 6, '_hidden_identity'),
        ('invariant.optimality', 7, '_optimality'),
        ('invariant.consistency_routes', 8, '_consistency'),
        ('invariant.constraint_cone_hull', 9, '_constraint_cone_hull'),
        ('invariant.exact_matches_closure', 10, '_exact_matches_closure'),
    )

    def _corpus(self, name, stream, fn):
        """Run fn(rng, k) on self.size instances; the check fails at the first instance returning a message"""
        def run():
            for k in range(self.size):
                message = fn(instances.rng_for(self.seed, stream * 1000 + k), k)
                if message:
                    return False, f"instance {k}: {message}"
            return True, f"{self.size} instances"
        return self.guarded(name, run)

    def run_corpus(self, name):
        """Run one named corpus and return its Check"""
        for corpus, stream, method in self.CORPORA:
            if corpus == name:
                return self._corpus(name, stream, getattr(self, method))
        raise KeyError(name)

    def invariant_checks(self):
        for name, _, _ in self.CORPORA:
            self.run_corpus(name)
        self.guarded('instance.not_fm', self._not_fm)
        self.guarded('instance.kkt_abs', self._kkt_abs)

    def _biconjugate(self, rng, k):
        f = instances.random_function(rng, 2, finite=bool(k % 2))
        if not convexfn.same_function(convexfn.conjugate(convexfn.conjugate(f)), f):
            return "f** differs from f"
        d = instances.random_vector(rng, 2)
        f_inf = convexfn.recession_function(f)
        if convexfn.evaluate(f_inf, d) != convexfn.recession_via_support(f, d):
            return f"f-infinity and the support of dom f* disagree at {ratgeom.fmt(d)}"

        directions = convexfn.sublevel(f_inf, 0)
        if not ratgeom.equal(ratgeom.polar(convexfn.domain(convexfn.conjugate(f))), directions):
            return "[f-infinity <= 0] differs from the polar of dom f*"
        r = int(rng.integers(-3, 4))
        level = convexfn.sublevel(f, r)
        if not level.is_empty() and not ratgeom.equal(ratgeom.recession_cone(level), directions):
            return f"recession cone of [f <= {r}] differs from [f-infinity <= 0]"

        x = instances.random_vector(rng, 2)
        for t in PERSPECTIVE_LEVELS:
            if convexfn.perspective_support(f, x, t) != perspective_formula(f, x, t):
                return f"support of epi f* at ({ratgeom.fmt(x)}, {t}) differs from the perspective of f"

        x0 = oracle.sample_domain(f, 1 + k % 3, self.seed + k).points[-1]
        value = convexfn.evaluate(f, x0)
        sub = convexfn.subdifferential(f, x0)
        for y in sub.v.points:
            if value + convexfn.evaluate(convexfn.conjugate(f), y) != ratgeom.dot(x0, y):
                return f"Fenchel-Young equality fails for the subgradient {ratgeom.fmt(y)}"
            z = instances.random_vector(rng, 2)
            if convexfn.evaluate(f, z) < value + ratgeom.dot(y, ratgeom.sub(z, x0)):
                return f"subgradient inequality fails at {ratgeom.fmt(z)}"
        y = instances.random_vector(rng, 2)
        tight = value + convexfn.evaluate(convexfn.conjugate(f), y) == ratgeom.dot(x0, y)
        if tight != ratgeom.contains(sub, y):
            return f"Fenchel-Young equality and subdifferential membership disagree at {ratgeom.fmt(y)}"
        return None

    def _restriction(self, rng, k):
        f = instances.random_function(rng, 2)
        b = instances.random_polyhedron(rng, 2, ratgeom.zeros(2), bounded=bool(k % 2))
        left = convexfn.conjugate(convexfn.add_indicator(f, b)).epi
        right = ratgeom.minkowski_sum(convexfn.conjugate(f).epi, convexfn.indicator_conjugate_epi(b))
        return None if ratgeom.equal(left, right) else "epi (f + indicator B)* differs from epi f* + epi support_B"

    def _closure_is_support(self, rng, k):
        sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
        if not ratgeom.equal(farkas.epi_delta_A(sigma), farkas.support_epigraph_of_solutions(sigma)):
            return "cl K differs from the epigraph of the support function of A"
        return None

    def _closure_of_sum(self, rng, k):
        f, sigma = instances.random_hidden_pair(rng, 2, 1 + k % 2, fails=False)
        left = farkas.closure_of_sum(f, sigma)
        right = convexfn.conjugate(convexfn.add_indicator(f, sigma.a)).epi
        return None if ratgeom.equal(left, right) else "cl(epi f* + K) differs from epi (f + indicator A)*"

    def _forward(self, rng, k):
        fc = instances.forward_certificate(rng, 2, 1 + k % 3)
        verdict = farkas.check_consequence(fc.f, fc.x_star, fc.s, fc.sigma)
        if verdict.status != farkas.CERTIFIED:
            return f"expected a certified consequence, got {verdict.status}"
        if not farkas.verify_certificate(verdict.certificate, fc.f, fc.x_star, fc.s, fc.sigma):
            return "returned certificate fails re-verification"
        if farkas.lagrangian_bound(verdict.certificate, fc.f, fc.x_star, fc.sigma) < fc.s:
            return "Lagrangian bound below s"
        cloud = oracle.sample_feasible(fc.sigma, self.samples, self.seed + k)
        message = verdict_contradiction(verdict, fc.f, fc.sigma, cloud)
        if message:
            return message

        t = Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
        scaled_f = convexfn.nonnegative_combination([(t, fc.f)], fc.sigma.n)
        scaled = farkas.check_consequence(scaled_f, ratgeom.scale(t, fc.x_star), t * fc.s, fc.sigma)
        if scaled.status != verdict.status:
            return f"scaling the query by {t} changed the verdict to {scaled.status}"

        harder = farkas.check_consequence(fc.f, fc.x_star, fc.s + int(rng.integers(1, 4)), fc.sigma)
        return verdict_contradiction(harder, fc.f, fc.sigma, cloud)

    def _hidden_identity(self, rng, k):
        fails = bool(k % 2)
        f, sigma = instances.random_hidden_pair(rng, 2, 1 + k % 2, fails)
        hidden = farkas.hidden_assumption(f, sigma)
        if hidden.holds == fails:
            return f"generator asked for fails={fails}, hidden assumption is {hidden.status}"
        if farkas.verify_cone_identity(f, sigma) != fails:
            return "cone identity does not track the hidden assumption"
        if fails:
            x_star = instances.random_vector(rng, 2)
            if not farkas.recession_conditions(f, sigma, x_star).agree:
                return f"recession conditions disagree at x* = {ratgeom.fmt(x_star)}"
        return None

    def _optimality(self, rng, k):
        sigma, x0 = instances.random_consistent_system(rng, 2, 1 + k % 2)
        f = instances.random_function(rng, 2)
        x_star = instances.random_vector(rng, 2, -1, 1)
        p = optimal.PerturbedProblem(sigma, f, x_star)
        direct = optimal.solve_direct(p)
        if direct.status != 'Optimal':
            if optimal.is_optimal(p, x0):
                return "is_optimal accepted a point of an unbounded problem"
            return None
        if not optimal.is_optimal(p, direct.x):
            return f"direct optimum {ratgeom.fmt(direct.x)} rejected"
        if p.objective_value(x0) > direct.value and optimal.is_optimal(p, x0):
            return f"suboptimal point {ratgeom.fmt(x0)} accepted"
        cert = optimal.kkt_find(p, direct.x)
        if cert is not None:
            if not optimal.kkt_verify(p, direct.x, cert):
                return "KKT certificate fails verification"
            if not optimal.sum_rule_contains(p, direct.x, cert.lambdas):
                return "subdifferential sum rule containment fails"
        elif farkas.closedness_of_sum(f, sigma).closed is True:
            return "no KKT certificate although epi f* + K is closed"
        return None

    def _consistency(self, rng, k):
        if k % 5 < 2:
            sigma = instances.random_inconsistent_system(rng, 2, 2 + k % 2)
            expected = farkas.INCONSISTENT
        else:
            sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
            expected = farkas.CONSISTENT
        status = farkas.is_consistent(sigma, diagnostics=True).status
        return None if status == expected else f"expected {expected}, got {status}"

    def _constraint_cone_hull(self, rng, k):
        sigma, _ = instances.random_consistent_system(rng, 2, 1 + k % 3)
        n = sigma.n
        conjugates = [convexfn.conjugate(g) for _, g in sigma.constraints]
        hull = ratgeom.minkowski_sum_all([ratgeom.closed_conic_hull(g.epi) for g in conjugates], n + 1)
        support_b = convexfn.indicator_conjugate_epi(sigma.b)
        if not ratgeom.equal(hull, support_b):
            return "cl cone of the constraint conjugate epigraphs differs from the epigraph of the support of B"
        y = instances.random_vector(rng, n)
        if convexfn.evaluate(convexfn.PolyhedralFunction(n, hull), y) != convexfn.support_eval(sigma.b, y):
            return f"support of B and the cone hull disagree at {ratgeom.fmt(y)}"
        domains = ratgeom.minkowski_sum_all([ratgeom.closed_conic_hull(convexfn.domain(g)) for g in conjugates], n)
        if not ratgeom.equal(ratgeom.project(support_b, range(n)), domains):
            return "barr B differs from cl cone of the constraint conjugate domains"
        return None

    def _exact_matches_closure(self, rng, k):
        fc = instances.forward_certificate(rng, 2, 1 + k % 3)
        if not farkas.is_farkas_minkowski(fc.sigma).holds:
            return None
        inside = fc.x_star + (-fc.s,)
        queries = [inside, ratgeom.add(inside, (0, 0, -int(rng.integers(1, 4)))), instances.random_vector(rng, 3)]
        for q in queries:
            exact = farkas.member_exact(q, fc.f, fc.sigma) is not None
            if exact != farkas.member_closure(q, fc.f, fc.sigma):
                return f"exact and closure membership disagree at {ratgeom.fmt(q)} for a finite f on an FM system"
        return None

    def _not_fm(self):
        f, sigma = instances.not_fm()
        fm = farkas.is_farkas_minkowski(sigma)
        if fm.holds or fm.offending_ray is None:
            return False, fm.status
        ray = ratgeom.canonical_line(fm.offending_ray)
        if ray != ratgeom.vec((0, 1, 0)):
            return False, f"offending ray {ratgeom.fmt(fm.offending_ray)}"
        gap = farkas.member_closure(fm.offending_ray, None, sigma) and farkas.member_exact(fm.offending_ray, None, sigma) is None
        return gap, f"offending ray {ratgeom.fmt(fm.offending_ray)}"

    def _kkt_abs(self):
        p, x_bar = instances.kkt_abs()
        cert = optimal.kkt_find(p, x_bar)
        if cert is None:
            return False, 'no certificate'
        return cert.lambdas == {'f1': 1} and optimal.kkt_verify(p, x_bar, cert), "lambdas " + ", ".join(f"{k}={v}" for k, v in cert.lambdas.items())

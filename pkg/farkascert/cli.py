"""
Command-line front end.

    python -m farkascert check problems/example1.json
    python -m farkascert consistency problems/infeasible_pair.json --text
    python -m farkascert certify problems/halfline.json > cert.json
    python -m farkascert certify problems/halfline.json --verify cert.json
    python -m farkascert kkt problems/kkt_abs.json --verify kkt.json
    python -m farkascert selftest --seed 42 --xlsx selftest.xlsx

The JSON report goes to stdout, logging and error messages to stderr.
Exit codes: 0 verdict computed (any verdict), 1 input error or failed internal
self-check (logged as "Internal error"), 2 resource limit, 3 selftest failure.
"""

import argparse
import logging
import sys

from farkascert import __version__, config, farkas, optimal, report
from farkascert.errors import CertificateError, FarkasError, ProblemFileError, ResourceLimitExceeded, SolverError
from farkascert.problemfile import load_problem
from farkascert.ratgeom import fmt
from farkascert.selftest import GOLDEN_PATH, SelfTest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_LIMIT = 2
EXIT_SELFTEST = 3

PROBLEM_COMMANDS = ('check', 'certify', 'consistency', 'fm', 'hidden', 'diagnose', 'optimal', 'kkt')


class Runner:
    """Runs one command against one problem file and builds the result block of the report"""

    def __init__(self, problem):
        self.problem = problem
        self.sigma = problem.sigma
        self.f = problem.f
        self.query = problem.query

    def check(self, args):
        verdict = farkas.check_consequence(self.f, self.query['x_star'], self.query['s'], self.sigma)
        return report.verdict_dict(verdict)

    def certify(self, args):
        if args.verify:
            return self.verify(args.verify)
        verdict = farkas.check_consequence(self.f, self.query['x_star'], self.query['s'], self.sigma)
        result = report.verdict_dict(verdict)
        if verdict.certificate is not None:
            bound = farkas.lagrangian_bound(verdict.certificate, self.f, self.query['x_star'], self.sigma)
            result['lagrangian_bound'] = report.rational(bound)
        return result

    @staticmethod
    def _certificate_block(path):
        loaded = report.load_report(path)
        result = loaded.get('result') if isinstance(loaded, dict) else None
        block = result.get('certificate') if isinstance(result, dict) else None
        if block is None:
            raise ProblemFileError(f"{path}: result.certificate", "report carries no certificate")
        return block

    def verify(self, path):
        block = self._certificate_block(path)
        try:
            cert = report.certificate_from_dict(block, 'result.certificate')
        except CertificateError as e:
            logger.warning(f"Certificate rejected on re-read: {e}")
            return {'verified': False, 'reason': str(e)}
        verified = farkas.verify_certificate(cert, self.f, self.query['x_star'], self.query['s'], self.sigma)
        return {'verified': verified, 'certificate': report.certificate_dict(cert)}

    def consistency(self, args):
        return report.consistency_dict(farkas.is_consistent(self.sigma, diagnostics=True))

    def fm(self, args):
        return report.fm_dict(farkas.is_farkas_minkowski(self.sigma))

    def hidden(self, args):
        return report.hidden_dict(farkas.hidden_assumption(self.f, self.sigma))

    def _x_bar(self):
        if 'x_bar' not in self.query:
            raise ProblemFileError('query.x_bar', "required by the optimal and kkt commands")
        return self.query['x_bar']

    def optimal(self, args):
        p = self.problem.perturbed()
        x_bar = self._x_bar()
        direct = optimal.solve_direct(p)
        return {
            'x_bar': report.vector(x_bar),
            'optimal': optimal.is_optimal(p, x_bar),
            'objective_value': report.rational(p.objective_value(x_bar)),
            'direct': {'status': direct.status, 'value': report.rational(direct.value), 'x': report.vector(direct.x)},
        }

    def kkt(self, args):
        p = self.problem.perturbed()
        x_bar = self._x_bar()
        if args.verify:
            cert = report.kkt_from_dict(self._certificate_block(args.verify), 'result.certificate')
            verified = optimal.kkt_verify(p, x_bar, cert)
            if not verified:
                logger.warning(f"KKT certificate in {args.verify} fails exact re-verification")
            return {'x_bar': report.vector(x_bar), 'verified': verified, 'certificate': report.kkt_dict(cert)}
        closedness = farkas.closedness_of_sum(self.f, self.sigma)
        cert = optimal.kkt_find(p, x_bar, closedness)
        result = {
            'x_bar': report.vector(x_bar),
            'active': optimal.active_constraints(p, x_bar),
            'closedness': report.closedness_dict(closedness),
            'certificate': None,
        }
        if cert is not None:
            result['certificate'] = report.kkt_dict(cert)
            result['verified'] = optimal.kkt_verify(p, x_bar, cert)
            result['sum_rule_contained'] = optimal.sum_rule_contains(p, x_bar, cert.lambdas)
        return result

    def diagnose(self, args):
        """Consistency, hidden assumption, FM, cone identity, recession witness, consequence"""
        narrative = []
        result = {}
        consistency = farkas.is_consistent(self.sigma, diagnostics=True)
        result['consistency'] = report.consistency_dict(consistency)
        if consistency.consistent:
            narrative.append(f"System is consistent, e.g. x = {fmt(consistency.witness)} solves it.")
        else:
            narrative.append("System is inconsistent: (0, -1) lies in the closure of the characteristic cone.")

        hidden = farkas.hidden_assumption(self.f, self.sigma)
        result['hidden_assumption'] = report.hidden_dict(hidden)
        if hidden.holds:
            narrative.append(f"Hidden assumption holds: x = {fmt(hidden.witness)} solves the system with f(x) finite.")
        else:
            narrative.append("Hidden assumption fails: no solution of the system lies in dom f.")
            narrative.append("Reverse Farkas equivalence not applicable: A ∩ dom f = ∅")

        fm = farkas.is_farkas_minkowski(self.sigma)
        result['fm'] = report.fm_dict(fm)
        if fm.holds:
            narrative.append("System is Farkas-Minkowski: the characteristic cone is closed.")
        elif fm.offending_ray is not None:
            narrative.append(f"System is not Farkas-Minkowski: {fmt(fm.offending_ray)} lies in cl K but not in K.")
        else:
            narrative.append(f"System is not Farkas-Minkowski: {fm.reason}.")

        identity = farkas.verify_cone_identity(self.f, self.sigma)
        result['cone_identity'] = identity
        narrative.append(
            "cl(epi f* + K) equals the cylinder over dom f* + cone(dom f_i*) + barr C: "
            + ('yes, as expected when A misses dom f.' if identity else 'no.'))

        x_star, s = self.query['x_star'], self.query['s']
        if not hidden.holds:
            conditions = farkas.recession_conditions(self.f, self.sigma, x_star)
            result['recession'] = report.recession_dict(conditions)
            if conditions.witness is not None:
                narrative.append(f"Recession witness d = {fmt(conditions.witness)}: f-infinity(d) < <x*, d>.")
            else:
                narrative.append(f"No recession witness for x* = {fmt(x_star)}.")
        else:
            closedness = farkas.closedness_of_sum(self.f, self.sigma)
            result['closedness'] = report.closedness_dict(closedness)
            if closedness.closed is None:
                narrative.append("Closedness of epi f* + K could not be decided.")
            else:
                state = 'closed' if closedness.closed else 'not closed'
                narrative.append(f"epi f* + K is {state} (decided by {closedness.route}).")

        verdict = farkas.check_consequence(self.f, x_star, s, self.sigma)
        result['consequence'] = report.verdict_dict(verdict)
        narrative.append(f"Query f(x) - <{fmt(x_star)}, x> >= {s}: {verdict.status}.")
        result['narrative'] = narrative
        return result


def build_parser():
    parser = argparse.ArgumentParser(prog='farkascert', description='Exact reverse Farkas certificates for polyhedral convex systems')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Master seed for sampling (default FARKAS_SEED or 42)')
    common.add_argument('--max-generators', type=int, help='Cap on double description generators')
    common.add_argument('--max-subsets', type=int, help='Cap on active-set rounds')
    output = common.add_mutually_exclusive_group()
    output.add_argument('--json', dest='fmt', action='store_const', const='json', help='Machine-readable report (default)')
    output.add_argument('--text', dest='fmt', action='store_const', const='text', help='Human-readable report')
    common.add_argument('--xlsx', help='Also write the report as a styled workbook')
    common.add_argument('--verbose', '-v', action='store_true', help='Log progress to stderr')

    sub = parser.add_subparsers(dest='command', required=True)
    helps = {
        'check': 'Decide the consequence query of the problem file',
        'certify': 'Emit a multiplier certificate, or re-verify one with --verify',
        'consistency': 'Primal and dual consistency with the existence diagnostics',
        'fm': 'Farkas-Minkowski test with an offending ray',
        'hidden': 'Does the solution set meet dom f?',
        'diagnose': 'Full pipeline with a narrative',
        'optimal': 'Is x_bar optimal for the perturbed problem?',
        'kkt': 'KKT multipliers at x_bar',
    }
    for name in PROBLEM_COMMANDS:
        cmd = sub.add_parser(name, parents=[common], help=helps[name])
        cmd.add_argument('problem', help='Path to a JSON problem file')
        if name in ('certify', 'kkt'):
            cmd.add_argument('--verify', metavar='REPORT', help='Re-verify the certificate in a previous report')
    selftest = sub.add_parser('selftest', parents=[common], help='Example 1 goldens and seeded invariant checks')
    selftest.add_argument('--golden', default=str(GOLDEN_PATH), help='Golden values file')
    selftest.add_argument('--full', action='store_true', help='Run the acceptance-size corpora')
    return parser


def emit(rep, args):
    if args.xlsx:
        report.write_xlsx(rep, args.xlsx)
    sys.stdout.write(report.render_text(rep) if args.fmt == 'text' else report.dumps(rep))


def run(args):
    if args.command == 'selftest':
        suite = SelfTest(seed=args.seed, full=args.full, golden_path=args.golden)
        suite.run()
        emit(report.envelope('selftest', suite.summary(), seed=suite.seed), args)
        if not suite.passed:
            failure = suite.first_failure
            print(f"❌ Selftest failed at {failure.name}: {failure.detail}", file=sys.stderr)
            return EXIT_SELFTEST
        return EXIT_OK

    problem = load_problem(args.problem)
    result = getattr(Runner(problem), args.command)(args)
    emit(report.envelope(args.command, result, problem.digest), args)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = 'INFO' if args.verbose else config.current().log_level
    logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s')

    try:
        with config.override(seed=args.seed, max_generators=args.max_generators, max_subsets=args.max_subsets):
            return run(args)
    except ResourceLimitExceeded as e:
        logger.error(f"Resource limit hit: {e}")
        return EXIT_LIMIT
    except (SolverError, CertificateError) as e:
        logger.error(f"Internal error: {e}")
        return EXIT_INPUT
    except FarkasError as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())

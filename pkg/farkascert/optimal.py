"""
Optimality and KKT analysis for the linearly perturbed problem

    min f(x) - <x*, x>  over x in C  subject to  f_i(x) <= 0.
"""

import dataclasses
import logging
import math

from farkascert import config, convexfn, exactlp, farkas, ratgeom
from farkascert.errors import DimensionMismatch, PointNotFeasible, PointOutsideDomain
from farkascert.ratgeom import ONE, ZERO, add, check_dim, dot, scale, vec, zeros

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class PerturbedProblem:
    sigma: farkas.ConvexSystem
    f: convexfn.PolyhedralFunction
    x_star: tuple

    def __post_init__(self):
        if self.f.n != self.sigma.n:
            raise DimensionMismatch(f"objective on Q^{self.f.n} for a system on Q^{self.sigma.n}")
        check_dim(self.x_star, self.sigma.n, 'x*')
        object.__setattr__(self, 'x_star', vec(self.x_star))

    def objective_value(self, x):
        value = convexfn.evaluate(self.f, x)
        return value if value == math.inf else value - dot(self.x_star, x)


@dataclasses.dataclass(frozen=True)
class KktCertificate:
    """x* = u* + v* + sum_J lambda_j u_j with u* in df(x), v* in N_C(x), u_j in df_j(x)"""
    lambdas: dict
    u_star: tuple
    v_star: tuple
    u_j: dict
    hypothesis_verified: bool = False
    closedness_route: str = None

    @property
    def J(self):
        return tuple(self.lambdas)


@dataclasses.dataclass(frozen=True)
class DirectSolution:
    status: str
    value: object = None
    x: tuple = None


def _check_point(p, x_bar):
    x_bar = vec(x_bar)
    check_dim(x_bar, p.sigma.n, 'x_bar')
    if not ratgeom.contains(p.sigma.a, x_bar):
        raise PointNotFeasible(f"{ratgeom.fmt(x_bar)} does not solve the system")
    value = convexfn.evaluate(p.f, x_bar)
    if value == math.inf:
        raise PointOutsideDomain(f"f(x) = +inf at {ratgeom.fmt(x_bar)}")
    return x_bar, value


def solve_direct(p):
    """Exact optimum of the perturbed problem by one LP over epi f and the solution set"""
    n = p.sigma.n
    prog = exactlp.ProgramBuilder()
    xt = prog.block(n + 1)
    prog.place(xt, p.f.epi.h)
    prog.place(xt[:n], p.sigma.a.h)
    objective = {xt[n]: ONE}
    for k, c in enumerate(p.x_star):
        if c:
            objective[xt[k]] = -c
    outcome = exactlp.solve(prog.program(objective, 'min'), certify=False)
    if outcome.status == exactlp.OPTIMAL:
        return DirectSolution(outcome.status, outcome.value, outcome.primal[:n])
    if outcome.status == exactlp.UNBOUNDED:
        return DirectSolution(outcome.status, -math.inf)
    return DirectSolution(outcome.status, math.inf)


def is_optimal(p, x_bar):
    """(x*, <x*, x_bar> - f(x_bar)) in cl(epi f* + K)"""
    x_bar, value = _check_point(p, x_bar)
    q = p.x_star + (dot(p.x_star, x_bar) - value,)
    return farkas.member_closure(q, p.f, p.sigma)


def active_constraints(p, x_bar):
    return [name for name, g in p.sigma.constraints if convexfn.evaluate(g, x_bar) == 0]


def kkt_find(p, x_bar, closedness=None):
    """
    Multipliers on the active constraints with x* in df(x) + N_C(x) + sum lambda_j df_j(x).

    Completeness needs epi f* + K to be closed; pass a farkas.Closedness to
    reuse an earlier check, otherwise it is computed here.
    """
    x_bar, _ = _check_point(p, x_bar)
    n = p.sigma.n
    if closedness is None:
        closedness = farkas.closedness_of_sum(p.f, p.sigma)
    verified = closedness.closed is True
    if not verified:
        logger.warning("Closedness of epi f* + K not verified: a missing KKT certificate does not rule out optimality")

    u_set = convexfn.subdifferential(p.f, x_bar)
    v_set = convexfn.subdifferential(convexfn.indicator(p.sigma.c), x_bar)
    active = active_constraints(p, x_bar)
    pieces = {name: convexfn.subdifferential(p.sigma.function(name), x_bar) for name in active}
    if u_set.is_empty() or v_set.is_empty():
        return None
    built = {}

    def build(candidates):
        prog = exactlp.ProgramBuilder()
        u = prog.block(n)
        prog.place(u, u_set.h)
        v = prog.block(n)
        prog.place(v, v_set.h)
        blocks = [u, v]
        scaled = {}
        for name in candidates:
            w = prog.block(n)
            lam = prog.block(1, nonnegative=True)[0]
            prog.place(w, pieces[name].h, scale=lam)
            scaled[name] = (w, lam)
            blocks.append(w)
        for k in range(n):
            prog.eq({block[k]: ONE for block in blocks}, p.x_star[k])
        built.update(u=u, v=v, scaled=scaled)
        return prog.region(), {name: lam for name, (_, lam) in scaled.items()}

    candidates = [name for name in active if not pieces[name].is_empty()]
    found = exactlp.shrink_to_positive(build, candidates, config.current().max_subsets)
    if found is None:
        return None
    point, chosen, _ = found
    lambdas, u_j = {}, {}
    for name in chosen:
        w, lam = built['scaled'][name]
        lambdas[name] = point[lam]
        u_j[name] = tuple(point[j] / point[lam] for j in w)
    cert = KktCertificate(
        lambdas=lambdas,
        u_star=tuple(point[j] for j in built['u']),
        v_star=tuple(point[j] for j in built['v']),
        u_j=u_j,
        hypothesis_verified=verified,
        closedness_route=closedness.route,
    )
    logger.info(f"KKT certificate found with multipliers on {list(cert.J)}")
    return cert


def kkt_verify(p, x_bar, cert):
    """Exact re-check of stationarity, complementary slackness and subgradient membership"""
    try:
        x_bar, _ = _check_point(p, x_bar)
    except (PointNotFeasible, PointOutsideDomain) as e:
        logger.warning(f"KKT check at an inadmissible point: {e}")
        return False
    n = p.sigma.n
    if set(cert.lambdas) != set(cert.u_j) or not set(cert.lambdas) <= set(p.sigma.names):
        return False
    if len(cert.u_star) != n or len(cert.v_star) != n:
        return False
    total = add(cert.u_star, cert.v_star)
    for name, lam in cert.lambdas.items():
        if lam <= 0:
            return False
        if lam * convexfn.evaluate(p.sigma.function(name), x_bar) != 0:
            logger.info(f"Complementary slackness fails for {name!r}")
            return False
        total = add(total, scale(lam, cert.u_j[name]))
    if total != p.x_star:
        logger.info("Stationarity fails")
        return False
    if not ratgeom.contains(convexfn.subdifferential(p.f, x_bar), cert.u_star):
        return False
    if not ratgeom.contains(convexfn.subdifferential(convexfn.indicator(p.sigma.c), x_bar), cert.v_star):
        return False
    return all(
        ratgeom.contains(convexfn.subdifferential(p.sigma.function(name), x_bar), u)
        for name, u in cert.u_j.items()
    )


def sum_rule_contains(p, x_bar, lambdas):
    """df(x) + N_C(x) + sum lambda_j df_j(x) is inside d(f + indicator C + sum lambda_j f_j)(x)"""
    x_bar, _ = _check_point(p, x_bar)
    n = p.sigma.n
    terms = [(ONE, p.f), (ONE, convexfn.indicator(p.sigma.c))]
    parts = [convexfn.subdifferential(p.f, x_bar),
             convexfn.subdifferential(convexfn.indicator(p.sigma.c), x_bar)]
    for name, lam in lambdas.items():
        if lam == 0:
            continue
        g = p.sigma.function(name)
        terms.append((lam, g))
        shrink = [tuple(ONE / lam if i == k else ZERO for i in range(n)) for k in range(n)]
        parts.append(ratgeom.preimage(convexfn.subdifferential(g, x_bar), shrink, zeros(n)))
    if any(part.is_empty() for part in parts):
        return True
    left = ratgeom.minkowski_sum_all(parts, n)
    right = convexfn.subdifferential(convexfn.nonnegative_combination(terms, n), x_bar)
    return ratgeom.subset(left, right)

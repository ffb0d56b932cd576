"""
Reverse Farkas engine for convex systems  f_i(x) <= 0 (i in I), x in C.

The characteristic cone K = epi(support of C) + cone(U_i epi f_i*) is never built
as a set; membership in it (and in epi f* + K) is decided by LPs over the
conjugate epigraphs. Closure membership is a single feasibility LP, exact
membership adds the strict side condition lambda_i > 0 through positivity tests.
"""

import dataclasses
import logging
import math
import threading

from farkascert import config, convexfn, exactlp, ratgeom
from farkascert.errors import (
    CertificateError, DimensionMismatch, EmptyOperand, HiddenAssumptionFails, InconsistentSystem,
    PremiseViolated, SolverError,
)
from farkascert.ratgeom import ONE, ZERO, Polyhedron, add, check_dim, dot, is_zero, neg, primitive, scale, to_fraction, vec, zeros

logger = logging.getLogger(__name__)

CERTIFIED = 'CertifiedConsequence'
ASYMPTOTIC = 'AsymptoticConsequence'
NOT_CONSEQUENCE = 'NotConsequence'
VACUOUS = 'VacuousHiddenAssumptionFails'

HOLDS = 'Holds'
FAILS = 'Fails'

CONSISTENT = 'Consistent'
INCONSISTENT = 'Inconsistent'

FM = 'FM'
NOT_FM = 'NotFM'


# ---------------------------------------------------------------------------
# Systems and their characteristic cone
# ---------------------------------------------------------------------------

class CharacteristicCone:
    """epi of the support function of C plus the conjugate epigraphs of the constraints"""

    def __init__(self, n, base, pieces):
        self.n = n
        self.base = base
        self.pieces = tuple(pieces)
        self._closure = None
        self._lock = threading.Lock()

    @property
    def closure(self):
        """cl K = base + sum of closed conic hulls, with a minimal V-representation"""
        with self._lock:
            if self._closure is None:
                total = self.base
                for piece in self.pieces:
                    total = ratgeom.minkowski_sum(total, ratgeom.closed_conic_hull(piece))
                self._closure = Polyhedron.from_h(total.h)
                logger.info(f"Characteristic cone closure built from {len(self.pieces)} constraint pieces")
            return self._closure


class ConvexSystem:
    """f_i(x) <= 0 for every named constraint, x in C"""

    def __init__(self, n, c=None, constraints=()):
        self.n = n
        self.c = ratgeom.whole_space(n) if c is None else c
        if self.c.dim != n:
            raise DimensionMismatch(f"set C of dimension {self.c.dim} in a system on Q^{n}")
        if self.c.is_empty():
            raise EmptyOperand("the set C of a system must be nonempty")
        seen = set()
        checked = []
        for name, f in constraints:
            name = str(name)
            if name in seen:
                raise ValueError(f"duplicate constraint name {name!r}")
            if f.n != n:
                raise DimensionMismatch(f"constraint {name!r} lives on Q^{f.n}, the system on Q^{n}")
            seen.add(name)
            checked.append((name, f))
        self.constraints = tuple(checked)
        self._lock = threading.RLock()
        self._b = None
        self._a = None
        self._cone = None

    @property
    def names(self):
        return tuple(name for name, _ in self.constraints)

    def function(self, name):
        for candidate, f in self.constraints:
            if candidate == name:
                return f
        raise KeyError(name)

    @property
    def b(self):
        """B, the intersection of the zero sublevel sets"""
        with self._lock:
            if self._b is None:
                sets = [convexfn.sublevel(f, 0) for _, f in self.constraints]
                self._b = ratgeom.intersect_all(sets, self.n) if sets else ratgeom.whole_space(self.n)
            return self._b

    @property
    def a(self):
        """A = B and C, the solution set"""
        with self._lock:
            if self._a is None:
                self._a = ratgeom.intersect(self.b, self.c)
            return self._a

    @property
    def cone(self):
        with self._lock:
            if self._cone is None:
                base = convexfn.indicator_conjugate_epi(self.c)
                pieces = [convexfn.conjugate(f).epi for _, f in self.constraints]
                self._cone = CharacteristicCone(self.n, base, pieces)
            return self._cone

    def __repr__(self):
        return f"ConvexSystem(n={self.n}, constraints={list(self.names)})"


def characteristic_cone(sigma):
    return sigma.cone


def barrier_cone(sigma):
    """barr C, the domain of the support function of C"""
    return ratgeom.project(sigma.cone.base, range(sigma.n))


def is_solvable(sigma):
    return exactlp.feasible_point(sigma.a.h) is not None


# ---------------------------------------------------------------------------
# Membership in epi f* + K and in its closure
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ClosureDecomposition:
    """q = objective_part + system_part + sum of cone_parts[i]; cone_parts[i] = (w_i, lambda_i) with w_i in lambda_i epi f_i* (or its recession cone when lambda_i = 0)"""
    objective_part: tuple
    system_part: tuple
    cone_parts: dict


@dataclasses.dataclass(frozen=True)
class ExactDecomposition:
    """q = objective_part + system_part + sum lambda_i z_i with lambda_i > 0 and z_i in epi f_i*"""
    objective_part: tuple
    system_part: tuple
    multipliers: dict
    pieces: dict

    def total(self, dim):
        parts = [self.system_part] + [scale(lam, self.pieces[name]) for name, lam in self.multipliers.items()]
        if self.objective_part is not None:
            parts.append(self.objective_part)
        return ratgeom.vsum(parts, dim)


def _membership_program(q, f, sigma, active):
    n = sigma.n
    cone = sigma.cone
    prog = exactlp.ProgramBuilder()
    parts = []
    objective_block = None
    if f is not None:
        objective_block = prog.block(n + 1)
        prog.place(objective_block, convexfn.conjugate(f).epi.h)
        parts.append(objective_block)
    system_block = prog.block(n + 1)
    prog.place(system_block, cone.base.h)
    parts.append(system_block)
    scaled = {}
    for i in active:
        w = prog.block(n + 1)
        lam = prog.block(1, nonnegative=True)[0]
        prog.place(w, cone.pieces[i].h, scale=lam)
        scaled[i] = (w, lam)
        parts.append(w)
    for k in range(n + 1):
        prog.eq({block[k]: ONE for block in parts}, q[k])
    return prog, objective_block, system_block, scaled


def _pick(point, block):
    return None if block is None else tuple(point[j] for j in block)


def _check_query(q, f, sigma):
    check_dim(q, sigma.n + 1, 'dual point')
    if f is not None and f.n != sigma.n:
        raise DimensionMismatch(f"function on Q^{f.n} queried against a system on Q^{sigma.n}")
    return vec(q)


def closure_decomposition(q, f, sigma):
    """A decomposition of q over epi f* + cl K, or None; f may be None for cl K alone"""
    q = _check_query(q, f, sigma)
    prog, objective_block, system_block, scaled = _membership_program(q, f, sigma, range(len(sigma.constraints)))
    point = exactlp.feasible_point(prog.region())
    if point is None:
        return None
    names = sigma.names
    return ClosureDecomposition(
        _pick(point, objective_block),
        _pick(point, system_block),
        {names[i]: (_pick(point, w), point[lam]) for i, (w, lam) in scaled.items()},
    )


def member_closure(q, f, sigma):
    """q in cl(epi f* + K)"""
    return closure_decomposition(q, f, sigma) is not None


def member_exact(q, f, sigma):
    """
    q in epi f* + K, decided exactly; returns an ExactDecomposition or None.

    Candidate active sets shrink from all of I, dropping every multiplier that
    cannot be positive on the restricted region; membership fails only when a
    restricted region becomes empty.
    """
    q = _check_query(q, f, sigma)
    names = sigma.names
    built = {}

    def build(active):
        prog, objective_block, system_block, scaled = _membership_program(q, f, sigma, active)
        built.update(objective_block=objective_block, system_block=system_block, scaled=scaled)
        return prog.region(), {i: scaled[i][1] for i in active}

    found = exactlp.shrink_to_positive(build, range(len(names)), config.current().max_subsets)
    if found is None:
        return None
    point, active, _ = found
    multipliers, pieces = {}, {}
    for i in active:
        w, lam = built['scaled'][i]
        value = point[lam]
        multipliers[names[i]] = value
        pieces[names[i]] = tuple(point[j] / value for j in w)
    return ExactDecomposition(
        _pick(point, built['objective_block']), _pick(point, built['system_block']), multipliers, pieces)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class FarkasCertificate:
    """
    Finite multipliers witnessing f(x) - <x*, x> >= s on the solution set:

        x* = u* + v* + sum_J lambda_j u_j
        f*(u*) + support_C(v*) + sum_J lambda_j f_j*(u_j) <= -s
    """
    x_star: tuple
    s: object
    u_star: tuple
    u_star_value: object
    v_star: tuple
    v_star_value: object
    lambdas: dict
    u_j: dict
    u_j_values: dict

    def __post_init__(self):
        problem = self.defect()
        if problem:
            raise CertificateError(problem)

    @property
    def J(self):
        return tuple(self.lambdas)

    def defect(self):
        """Description of the first violated condition, or None"""
        if set(self.lambdas) != set(self.u_j) or set(self.lambdas) != set(self.u_j_values):
            return "multiplier, subgradient and value maps name different constraints"
        if any(lam <= 0 for lam in self.lambdas.values()):
            return "every multiplier must be positive"
        values = [self.u_star_value, self.v_star_value] + list(self.u_j_values.values())
        if any(v == math.inf for v in values):
            return "a conjugate value is +inf"
        n = len(self.x_star)
        if n != len(self.u_star) or n != len(self.v_star) or any(len(u) != n for u in self.u_j.values()):
            return "dimension mismatch inside the certificate"
        total = add(self.u_star, self.v_star)
        for name, lam in self.lambdas.items():
            total = add(total, scale(lam, self.u_j[name]))
        if total != tuple(self.x_star):
            return "x* is not the sum u* + v* + sum lambda_j u_j"
        bound = self.u_star_value + self.v_star_value + sum(
            (lam * self.u_j_values[name] for name, lam in self.lambdas.items()), ZERO)
        if bound > -self.s:
            return f"conjugate values sum to {bound}, more than -s = {-self.s}"
        return None


def _certificate(dec, f, x_star, s, sigma):
    n = sigma.n
    u_star = dec.objective_part[:n]
    v_star = dec.system_part[:n]
    u_j = {name: z[:n] for name, z in dec.pieces.items()}
    return FarkasCertificate(
        x_star=x_star,
        s=s,
        u_star=u_star,
        u_star_value=convexfn.evaluate(convexfn.conjugate(f), u_star),
        v_star=v_star,
        v_star_value=convexfn.support_eval(sigma.c, v_star),
        lambdas=dict(dec.multipliers),
        u_j=u_j,
        u_j_values={name: convexfn.evaluate(convexfn.conjugate(sigma.function(name)), u) for name, u in u_j.items()},
    )


def verify_certificate(cert, f, x_star, s, sigma):
    """Exact re-check of a certificate against the query it claims to answer"""
    if tuple(cert.x_star) != tuple(vec(x_star)) or cert.s != to_fraction(s):
        logger.warning("Certificate answers a different query")
        return False
    unknown = set(cert.lambdas) - set(sigma.names)
    if unknown:
        logger.warning(f"Certificate names unknown constraints {sorted(unknown)}")
        return False
    recomputed = [
        (convexfn.evaluate(convexfn.conjugate(f), cert.u_star), cert.u_star_value),
        (convexfn.support_eval(sigma.c, cert.v_star), cert.v_star_value),
    ]
    for name, u in cert.u_j.items():
        recomputed.append((convexfn.evaluate(convexfn.conjugate(sigma.function(name)), u), cert.u_j_values[name]))
    for actual, claimed in recomputed:
        if actual == math.inf or actual != claimed:
            logger.warning(f"Certificate claims conjugate value {claimed}, exact value is {actual}")
            return False
    return cert.defect() is None


def lagrangian_bound(cert, f, x_star, sigma):
    """inf over x in C of f(x) - <x*, x> + sum_J lambda_j f_j(x); at least s for a valid certificate"""
    n = sigma.n
    prog = exactlp.ProgramBuilder()
    xt = prog.block(n + 1)
    prog.place(xt, f.epi.h)
    prog.place(xt[:n], sigma.c.h)
    objective = {xt[n]: ONE}
    for k, c in enumerate(vec(x_star)):
        if c:
            objective[xt[k]] = -c
    for name, lam in cert.lambdas.items():
        tj = prog.block(1)[0]
        prog.place(list(xt[:n]) + [tj], sigma.function(name).epi.h)
        objective[tj] = lam
    outcome = exactlp.solve(prog.program(objective, 'min'), certify=False)
    if outcome.status == exactlp.INFEASIBLE:
        return math.inf
    if outcome.status == exactlp.UNBOUNDED:
        return -math.inf
    return outcome.value


# ---------------------------------------------------------------------------
# Hidden assumption and the consequence pipeline
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class HiddenAssumption:
    status: str
    witness: tuple = None

    @property
    def holds(self):
        return self.status == HOLDS


def _solutions_in_epigraph(f, sigma):
    n = sigma.n
    prog = exactlp.ProgramBuilder()
    xt = prog.block(n + 1)
    prog.place(xt, f.epi.h)
    prog.place(xt[:n], sigma.a.h)
    return prog, xt


def hidden_assumption(f, sigma):
    """Does A meet dom f?"""
    prog, _ = _solutions_in_epigraph(f, sigma)
    point = exactlp.feasible_point(prog.region())
    if point is None:
        return HiddenAssumption(FAILS)
    return HiddenAssumption(HOLDS, point[:sigma.n])


def find_violation(f, x_star, s, sigma):
    """A solution x with f(x) - <x*, x> < s, or None"""
    n = sigma.n
    x_star, s = vec(x_star), to_fraction(s)
    check_dim(x_star, n, 'x*')
    prog, xt = _solutions_in_epigraph(f, sigma)
    objective = {xt[n]: ONE}
    for k, c in enumerate(x_star):
        if c:
            objective[xt[k]] = -c
    lp = prog.program(objective, 'min')
    outcome = exactlp.solve(lp, certify=False)
    if outcome.status == exactlp.INFEASIBLE:
        raise HiddenAssumptionFails("no solution of the system lies in dom f")
    if outcome.status == exactlp.OPTIMAL:
        return outcome.primal[:n] if outcome.value < s else None
    value = dot(lp.objective, outcome.primal)
    slope = dot(lp.objective, outcome.ray)
    steps = max(0, math.floor((value - s) / -slope)) + 1
    point = add(outcome.primal, scale(steps, outcome.ray))
    return point[:n]


@dataclasses.dataclass(frozen=True)
class ConsequenceVerdict:
    status: str
    x_star: tuple
    s: object
    certificate: FarkasCertificate = None
    witness: tuple = None
    diagnosis: dict = None

    @property
    def is_consequence(self):
        return self.status != NOT_CONSEQUENCE


def check_consequence(f, x_star, s, sigma):
    """Is f(x) - <x*, x> >= s implied by the system?"""
    x_star, s = vec(x_star), to_fraction(s)
    check_dim(x_star, sigma.n, 'x*')
    logger.info("Consequence pipeline started")

    hidden = hidden_assumption(f, sigma)
    if not hidden.holds:
        system = CONSISTENT if is_solvable(sigma) else INCONSISTENT
        logger.warning("Hidden assumption fails: no solution lies in dom f, the inequality holds vacuously")
        return ConsequenceVerdict(VACUOUS, x_star, s, diagnosis={'hidden_assumption': FAILS, 'system': system})

    q = x_star + (-s,)
    dec = member_exact(q, f, sigma)
    if dec is not None:
        cert = _certificate(dec, f, x_star, s, sigma)
        logger.info(f"Certified consequence with multipliers on {list(cert.J)}")
        return ConsequenceVerdict(CERTIFIED, x_star, s, certificate=cert)

    if member_closure(q, f, sigma):
        logger.warning("Consequence holds only asymptotically: no finite multiplier certificate exists")
        return ConsequenceVerdict(ASYMPTOTIC, x_star, s)

    witness = find_violation(f, x_star, s, sigma)
    if witness is None:
        raise SolverError("dual point outside the closure but no violating solution found")
    return ConsequenceVerdict(NOT_CONSEQUENCE, x_star, s, witness=witness)


def consequence_at_zero(f, s, sigma):
    """Is f(x) >= s implied by the system?"""
    return check_consequence(f, zeros(sigma.n), s, sigma)


# ---------------------------------------------------------------------------
# Dual identities around the hidden assumption
# ---------------------------------------------------------------------------

def closure_of_sum(f, sigma):
    """cl(epi f* + K) = epi f* + cl K as a polyhedron"""
    return ratgeom.minkowski_sum(convexfn.conjugate(f).epi, sigma.cone.closure)


def dual_sum(f, sigma):
    """dom f* + sum_i cl cone dom f_i* + barr C"""
    parts = [convexfn.domain(convexfn.conjugate(f)), barrier_cone(sigma)]
    parts += [ratgeom.closed_conic_hull(convexfn.domain(convexfn.conjugate(g))) for _, g in sigma.constraints]
    return ratgeom.minkowski_sum_all(parts, sigma.n)


def verify_cone_identity(f, sigma):
    """cl(epi f* + K) is the cylinder over dom f* + cone of constraint domains + barr C"""
    return ratgeom.equal(closure_of_sum(f, sigma), ratgeom.cylinder(dual_sum(f, sigma), 1))


def _recession_search(f, x_star, directions):
    """max <x*,d> - t over (d,t) in recc(epi f), d in directions, |d_k| <= 1; a positive optimum gives d"""
    n = f.n
    prog = exactlp.ProgramBuilder()
    dt = prog.block(n + 1)
    prog.place(dt, ratgeom.recession_cone(f.epi).h)
    prog.place(dt[:n], directions.h)
    for k in range(n):
        prog.le({dt[k]: ONE}, ONE)
        prog.le({dt[k]: -ONE}, ONE)
    objective = {dt[n]: -ONE}
    for k, c in enumerate(x_star):
        if c:
            objective[dt[k]] = c
    outcome = exactlp.solve(prog.program(objective, 'max'), certify=False)
    if outcome.status != exactlp.OPTIMAL:
        raise SolverError(f"normalized recession search returned {outcome.status}")
    if outcome.value > 0:
        return primitive(outcome.primal[:n])
    return None


def _constraint_recession_directions(sigma):
    """intersection of [f_i-infinity <= 0] (polars of dom f_i*) with recc C"""
    sets = [ratgeom.polar(convexfn.domain(convexfn.conjugate(g))) for _, g in sigma.constraints]
    sets.append(ratgeom.recession_cone(sigma.c))
    return ratgeom.intersect_all(sets, sigma.n)


def recession_witness(f, sigma, x_star):
    """d in the recession directions of the system with f-infinity(d) < <x*, d>, when A misses dom f"""
    x_star = vec(x_star)
    check_dim(x_star, sigma.n, 'x*')
    if hidden_assumption(f, sigma).holds:
        raise PremiseViolated("recession witnesses are only defined when the solution set misses dom f")
    return _recession_search(f, x_star, _constraint_recession_directions(sigma))


@dataclasses.dataclass(frozen=True)
class RecessionConditions:
    line_escapes: bool
    outside_dual_sum: bool
    witness: tuple
    solution_witness: tuple
    solutions_exist: bool

    @property
    def agree(self):
        found = self.witness is not None
        agree = self.line_escapes == self.outside_dual_sum == found
        if self.solutions_exist:
            agree = agree and (self.solution_witness is not None) == found
        return agree


def recession_conditions(f, sigma, x_star):
    """The equivalent failure conditions for a dual point x* when A misses dom f"""
    x_star = vec(x_star)
    witness = recession_witness(f, sigma, x_star)
    n = sigma.n
    total = closure_of_sum(f, sigma)
    vertical = ratgeom.unit(n + 1, n)
    line_inside = (ratgeom.contains(total, x_star + (ZERO,))
                   and ratgeom.contains_direction(total, vertical)
                   and ratgeom.contains_direction(total, neg(vertical)))
    outside = not ratgeom.contains(dual_sum(f, sigma), x_star)
    solutions_exist = is_solvable(sigma)
    solution_witness = None
    if solutions_exist:
        solution_witness = _recession_search(f, x_star, ratgeom.recession_cone(sigma.a))
    return RecessionConditions(not line_inside, outside, witness, solution_witness, solutions_exist)


# ---------------------------------------------------------------------------
# Constraint qualification, consistency, closedness
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class FarkasMinkowski:
    status: str
    offending_ray: tuple = None
    reason: str = None

    @property
    def holds(self):
        return self.status == FM


def is_farkas_minkowski(sigma):
    """A nonempty and K closed; the first generator of cl K outside K is reported"""
    if not is_solvable(sigma):
        return FarkasMinkowski(NOT_FM, reason='the system has no solution')
    v = sigma.cone.closure.v
    candidates = list(v.rays) + [g for line in v.lineality for g in (line, neg(line))]
    for g in candidates:
        if member_exact(g, None, sigma) is None:
            ray = primitive(g)
            logger.info(f"Characteristic cone is not closed along {ratgeom.fmt(ray)}")
            return FarkasMinkowski(NOT_FM, offending_ray=ray, reason='closure generator outside the characteristic cone')
    return FarkasMinkowski(FM)


@dataclasses.dataclass(frozen=True)
class ExistenceReport:
    consistent: bool
    dual_point_outside: bool
    cones_differ: bool
    barrier_sum_cylinder: bool
    union_hull_cylinder: bool
    sum_hull_cylinder: bool


def _hull_of_union(polyhedra, n):
    points, rays, lines = [], [], []
    for p in polyhedra:
        v = p.v
        points += v.points
        rays += v.rays
        lines += v.lineality
    if not points:
        return ratgeom.empty(n)
    return Polyhedron.from_v(ratgeom.VRep(n, tuple(points), tuple(rays), tuple(lines)))


def existence_conditions(sigma):
    """Consistency characterizations evaluated side by side; all equalities hold iff the system is inconsistent"""
    n = sigma.n
    cl_k = sigma.cone.closure
    barr = barrier_cone(sigma)
    domains = [convexfn.domain(convexfn.conjugate(g)) for _, g in sigma.constraints]

    barrier_sum = ratgeom.minkowski_sum_all([barr] + [ratgeom.closed_conic_hull(d) for d in domains], n)
    union_hull = ratgeom.closed_conic_hull(_hull_of_union(domains + [barr], n))
    sum_hull = ratgeom.minkowski_sum_all(
        [ratgeom.closed_conic_hull(ratgeom.minkowski_sum(d, barr)) for d in domains], n)

    union_cylinder = ratgeom.equal(cl_k, ratgeom.cylinder(union_hull, 1))
    return ExistenceReport(
        consistent=is_solvable(sigma),
        dual_point_outside=not member_closure(zeros(n) + (-ONE,), None, sigma),
        cones_differ=not union_cylinder,
        barrier_sum_cylinder=ratgeom.equal(cl_k, ratgeom.cylinder(barrier_sum, 1)),
        union_hull_cylinder=union_cylinder,
        sum_hull_cylinder=ratgeom.equal(cl_k, ratgeom.cylinder(sum_hull, 1)),
    )


@dataclasses.dataclass(frozen=True)
class Consistency:
    status: str
    witness: tuple = None
    certificate: ClosureDecomposition = None
    existence: ExistenceReport = None

    @property
    def consistent(self):
        return self.status == CONSISTENT


def is_consistent(sigma, diagnostics=False):
    """Primal feasibility of A, cross-checked against (0, -1) in cl K"""
    n = sigma.n
    witness = exactlp.feasible_point(sigma.a.h)
    certificate = closure_decomposition(zeros(n) + (-ONE,), None, sigma)
    if (witness is None) == (certificate is None):
        raise SolverError("primal and dual consistency routes disagree")
    status = CONSISTENT if witness is not None else INCONSISTENT
    existence = None
    if diagnostics:
        existence = existence_conditions(sigma)
        if existence.barrier_sum_cylinder != (status == INCONSISTENT):
            raise SolverError("cone identity for inconsistent systems disagrees with the primal route")
    logger.info(f"System is {status}")
    return Consistency(status, witness, certificate, existence)


def epi_delta_A(sigma):
    """cl K, which is the epigraph of the support function of A for a consistent system"""
    if not is_solvable(sigma):
        raise InconsistentSystem("cl K describes the support function of A only when A is nonempty")
    return sigma.cone.closure


def support_epigraph_of_solutions(sigma):
    """epi of the support function of A computed directly from A"""
    return convexfn.indicator_conjugate_epi(sigma.a)


@dataclasses.dataclass(frozen=True)
class Closedness:
    closed: object
    route: str
    fm: FarkasMinkowski
    interior_point: tuple = None


def _domain_interior_point(f, region):
    """A point of the region in the interior of dom f, or None"""
    n = f.n
    h = f.epi.h
    if any(not is_zero(row[:n]) for row, _ in h.equalities):
        return None
    prog = exactlp.ProgramBuilder()
    x = prog.block(n)
    slack = prog.block(1)[0]
    prog.place(x, region.h)
    for row, rhs in h.inequalities:
        if row[n] == 0 and not is_zero(row[:n]):
            coeffs = {x[k]: c for k, c in enumerate(row[:n]) if c}
            coeffs[slack] = ONE
            prog.le(coeffs, rhs)
    outcome = exactlp.solve(prog.program({slack: ONE}, 'max', upper={slack: ONE}), certify=False)
    if outcome.status == exactlp.OPTIMAL and outcome.value > 0:
        return outcome.primal[:n]
    return None


def closedness_of_sum(f, sigma):
    """
    Is epi f* + K closed?

    First by the sufficient condition FM plus f continuous at a solution,
    then by testing the generators of the closure. closed is None when
    neither route settles the question.
    """
    fm = is_farkas_minkowski(sigma)
    if fm.holds:
        point = _domain_interior_point(f, sigma.a)
        if point is not None:
            return Closedness(True, 'continuity', fm, point)

    total = Polyhedron.from_h(closure_of_sum(f, sigma).h)
    v = total.v
    for p in v.points:
        if member_exact(p, f, sigma) is None:
            return Closedness(False, 'generators', fm)
    directions = convexfn.indicator(convexfn.domain(f))
    for d in list(v.rays) + [g for line in v.lineality for g in (line, neg(line))]:
        if any(member_exact(add(p, d), f, sigma) is None for p in v.points):
            return Closedness(False, 'generators', fm)
        if member_exact(d, directions, sigma) is None:
            logger.warning("Closedness of epi f* + K undetermined: a closure direction is not a recession direction of the sum")
            return Closedness(None, None, fm)
    return Closedness(True, 'generators', fm)

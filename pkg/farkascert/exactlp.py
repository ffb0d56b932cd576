"""
Exact rational linear programming.

Two-phase tableau simplex with Bland's rule over Fraction. Every outcome carries a
certificate that is re-checked with exact arithmetic before it is returned:
Optimal -> primal point and dual multipliers with zero duality gap,
Infeasible -> Farkas ray, Unbounded -> feasible point and improving ray.

Dual multipliers and Farkas rays refer to the expanded row list of a program,
see `expanded_rows`: inequalities, then lower-bound rows (-x_j <= -l_j), then
upper-bound rows (x_j <= u_j), then equalities.
"""

import dataclasses
import logging
from fractions import Fraction

from farkascert.errors import DimensionMismatch, EmptyRegion, ResourceLimitExceeded, SolverError
from farkascert.ratgeom import HRep, ONE, ZERO, check_dim, dot, primitive, to_fraction, unit, vec, zeros

logger = logging.getLogger(__name__)

OPTIMAL = 'Optimal'
INFEASIBLE = 'Infeasible'
UNBOUNDED = 'Unbounded'


@dataclasses.dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    sense: str
    constraints: HRep
    lower: tuple = None
    upper: tuple = None

    def __post_init__(self):
        if self.sense not in ('min', 'max'):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        n = self.constraints.dim
        check_dim(self.objective, n, 'objective')
        for bounds in (self.lower, self.upper):
            if bounds is not None:
                check_dim(bounds, n, 'bound vector')

    @classmethod
    def feasibility(cls, constraints, lower=None, upper=None):
        return cls(zeros(constraints.dim), 'min', constraints, lower, upper)

    @property
    def n(self):
        return self.constraints.dim

    def bound(self, which, j):
        bounds = self.lower if which == 'lower' else self.upper
        return None if bounds is None else bounds[j]


@dataclasses.dataclass(frozen=True)
class LpOutcome:
    status: str
    primal: tuple = None
    value: Fraction = None
    dual: tuple = None
    ray: tuple = None


@dataclasses.dataclass(frozen=True)
class CanBePositive:
    witness: tuple


@dataclasses.dataclass(frozen=True)
class StuckAtZero:
    pass


def expanded_rows(lp):
    """(inequalities, equalities) with the variable bounds written out as rows"""
    n = lp.n
    ineq = list(lp.constraints.inequalities)
    for j in range(n):
        lo = lp.bound('lower', j)
        if lo is not None:
            ineq.append((tuple(-x for x in unit(n, j)), -lo))
    for j in range(n):
        up = lp.bound('upper', j)
        if up is not None:
            ineq.append((unit(n, j), up))
    return ineq, list(lp.constraints.equalities)


# ---------------------------------------------------------------------------
# Tableau simplex on  min c.z  s.t.  M z = q, z >= 0
# ---------------------------------------------------------------------------

class _Tableau:

    def __init__(self, matrix, rhs, structural):
        self.structural = structural
        m = len(matrix)
        self.rows = []
        for i, (row, b) in enumerate(zip(matrix, rhs)):
            if b < 0:
                row, b = [-x for x in row], -b
            artificial = [ONE if k == i else ZERO for k in range(m)]
            self.rows.append(list(row) + artificial + [b])
        self.basis = [structural + i for i in range(m)]
        self.width = structural + m

    def pivot(self, r, c):
        rows = self.rows
        inv = ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        pivot_row = rows[r]
        for i, row in enumerate(rows):
            if i != r and row[c] != 0:
                factor = row[c]
                rows[i] = [x - factor * y if y else x for x, y in zip(row, pivot_row)]
        self.basis[r] = c

    def run(self, cost, allowed):
        """Bland's rule; returns None at optimum or the entering column of an unbounded ray"""
        while True:
            in_basis = set(self.basis)
            entering = None
            for j in range(allowed):
                if j in in_basis:
                    continue
                reduced = cost[j] - sum(cost[b] * row[j] for b, row in zip(self.basis, self.rows) if cost[b] and row[j])
                if reduced < 0:
                    entering = j
                    break
            if entering is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return entering
            self.pivot(best[1], entering)

    def value_of(self, cost):
        return sum((cost[b] * row[-1] for b, row in zip(self.basis, self.rows)), ZERO)

    def solution(self):
        z = [ZERO] * self.width
        for b, row in zip(self.basis, self.rows):
            z[b] = row[-1]
        return z[:self.structural]

    def drive_out_artificials(self):
        i = 0
        while i < len(self.rows):
            if self.basis[i] >= self.structural:
                col = next((j for j in range(self.structural) if self.rows[i][j] != 0), None)
                if col is None:
                    del self.rows[i]
                    del self.basis[i]
                    continue
                self.pivot(i, col)
            i += 1


def _standard_form(lp, minimize_cost):
    """
    Substitute x = x0 + T z with z >= 0 and append slacks.

    Returns (matrix, rhs, cost, x0, columns) where columns[k] lists (j, coef)
    pairs giving the contribution of z_k to x_j.
    """
    n = lp.n
    x0 = [ZERO] * n
    columns = []
    extra_rows = []
    for j in range(n):
        lo, up = lp.bound('lower', j), lp.bound('upper', j)
        if lo is not None:
            x0[j] = lo
            columns.append([(j, ONE)])
            if up is not None:
                extra_rows.append((len(columns) - 1, up - lo))
        elif up is not None:
            x0[j] = up
            columns.append([(j, -ONE)])
        else:
            columns.append([(j, ONE)])
            columns.append([(j, -ONE)])

    def transform(row):
        return [sum((row[j] * c for j, c in col), ZERO) for col in columns]

    ineq = [(transform(row), rhs - dot(row, x0)) for row, rhs in lp.constraints.inequalities]
    for k, width in extra_rows:
        ineq.append(([ONE if i == k else ZERO for i in range(len(columns))], width))
    eqs = [(transform(row), rhs - dot(row, x0)) for row, rhs in lp.constraints.equalities]

    slacks = len(ineq)
    matrix, rhs = [], []
    for s, (row, b) in enumerate(ineq):
        matrix.append(row + [ONE if k == s else ZERO for k in range(slacks)])
        rhs.append(b)
    for row, b in eqs:
        matrix.append(row + [ZERO] * slacks)
        rhs.append(b)
    cost = transform(minimize_cost) + [ZERO] * slacks
    return matrix, rhs, cost, x0, columns


def _lift(columns, z, x0):
    x = list(x0)
    for zk, col in zip(z, columns):
        if zk:
            for j, c in col:
                x[j] += c * zk
    return tuple(x)


def _run_simplex(lp):
    """Returns (status, x, ray) without certificates"""
    c = lp.objective if lp.sense == 'min' else tuple(-x for x in lp.objective)
    matrix, rhs, cost, x0, columns = _standard_form(lp, c)
    structural = len(cost)
    tableau = _Tableau(matrix, rhs, structural)

    phase_one = [ZERO] * structural + [ONE] * len(matrix)
    tableau.run(phase_one, tableau.width)
    if tableau.value_of(phase_one) > 0:
        return INFEASIBLE, None, None
    tableau.drive_out_artificials()

    phase_two = cost + [ZERO] * len(matrix)
    entering = tableau.run(phase_two, structural)
    x = _lift(columns, tableau.solution(), x0)
    if entering is None:
        return OPTIMAL, x, None
    dz = [ZERO] * tableau.width
    dz[entering] = ONE
    for b, row in zip(tableau.basis, tableau.rows):
        dz[b] = -row[entering]
    ray = _lift(columns, dz[:structural], [ZERO] * lp.n)
    return UNBOUNDED, x, ray


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def _multiplier_program(ineq, eqs, n, target, target_value):
    """Feasibility LP for y >= 0, w free with A'y + E'w = target and b.y + e.w = target_value"""
    p, q = len(ineq), len(eqs)
    rows = [row for row, _ in ineq] + [row for row, _ in eqs]
    rhs = [b for _, b in ineq] + [b for _, b in eqs]
    equalities = []
    for k in range(n):
        equalities.append((tuple(r[k] for r in rows), target[k]))
    equalities.append((tuple(rhs), target_value))
    lower = tuple([ZERO] * p + [None] * q)
    return LinearProgram.feasibility(HRep(p + q, (), tuple(equalities)), lower=lower)


def _farkas_ray(lp):
    ineq, eqs = expanded_rows(lp)
    aux = _multiplier_program(ineq, eqs, lp.n, zeros(lp.n), -ONE)
    status, y, _ = _run_simplex(aux)
    if status != OPTIMAL:
        raise SolverError("no Farkas ray found for a program the simplex declared infeasible")
    return primitive(y)


def _dual_multipliers(lp, min_cost, value):
    ineq, eqs = expanded_rows(lp)
    aux = _multiplier_program(ineq, eqs, lp.n, tuple(-x for x in min_cost), -value)
    status, y, _ = _run_simplex(aux)
    if status != OPTIMAL:
        raise SolverError("no optimal dual solution found for an optimal program")
    return y


def verify_outcome(lp, outcome):
    """Exact re-check of an outcome's certificate; raises SolverError on failure"""
    ineq, eqs = expanded_rows(lp)
    min_cost = lp.objective if lp.sense == 'min' else tuple(-x for x in lp.objective)

    def feasible(x):
        return (all(dot(row, x) <= b for row, b in ineq)
                and all(dot(row, x) == b for row, b in eqs))

    if outcome.status == OPTIMAL:
        if not feasible(outcome.primal):
            raise SolverError("optimal point is not feasible")
        if dot(lp.objective, outcome.primal) != outcome.value:
            raise SolverError("optimal value does not match the point")
        if outcome.dual is not None:
            y = outcome.dual
            p = len(ineq)
            if any(v < 0 for v in y[:p]):
                raise SolverError("negative inequality multiplier")
            rows = [row for row, _ in ineq] + [row for row, _ in eqs]
            rhs = [b for _, b in ineq] + [b for _, b in eqs]
            for k in range(lp.n):
                if min_cost[k] + sum((yi * r[k] for yi, r in zip(y, rows)), ZERO) != 0:
                    raise SolverError("dual multipliers are not stationary")
            if dot(min_cost, outcome.primal) != -dot(y, tuple(rhs)):
                raise SolverError("nonzero duality gap")
    elif outcome.status == INFEASIBLE:
        if outcome.ray is not None:
            y = outcome.ray
            p = len(ineq)
            rows = [row for row, _ in ineq] + [row for row, _ in eqs]
            rhs = [b for _, b in ineq] + [b for _, b in eqs]
            if any(v < 0 for v in y[:p]):
                raise SolverError("negative entry in Farkas ray")
            for k in range(lp.n):
                if sum((yi * r[k] for yi, r in zip(y, rows)), ZERO) != 0:
                    raise SolverError("Farkas ray does not annihilate the rows")
            if dot(y, tuple(rhs)) >= 0:
                raise SolverError("Farkas ray does not certify infeasibility")
    elif outcome.status == UNBOUNDED:
        d = outcome.ray
        if not feasible(outcome.primal):
            raise SolverError("unbounded program returned an infeasible point")
        if not (all(dot(row, d) <= 0 for row, _ in ineq) and all(dot(row, d) == 0 for row, _ in eqs)):
            raise SolverError("unbounded ray leaves the feasible region")
        if dot(min_cost, d) >= 0:
            raise SolverError("unbounded ray does not improve the objective")
    return True


def solve(lp, certify=True):
    """
    Solve exactly. With certify=False the dual / Farkas certificates are skipped,
    the primal data are still verified.
    """
    status, x, ray = _run_simplex(lp)
    if status == OPTIMAL:
        value = dot(lp.objective, x)
        dual = None
        if certify:
            min_cost = lp.objective if lp.sense == 'min' else tuple(-c for c in lp.objective)
            dual = _dual_multipliers(lp, min_cost, dot(min_cost, x))
        outcome = LpOutcome(OPTIMAL, primal=x, value=value, dual=dual)
    elif status == INFEASIBLE:
        outcome = LpOutcome(INFEASIBLE, ray=_farkas_ray(lp) if certify else None)
    else:
        outcome = LpOutcome(UNBOUNDED, primal=x, ray=primitive(ray))
    verify_outcome(lp, outcome)
    return outcome


def feasible_point(region, lower=None, upper=None):
    """Some point of the region, or None when it is empty"""
    outcome = solve(LinearProgram.feasibility(region, lower, upper), certify=False)
    return outcome.primal if outcome.status == OPTIMAL else None


def sup_positive(region, coordinate):
    """Can x[coordinate] be positive somewhere on the region? Decided with the cap x[coordinate] <= 1."""
    n = region.dim
    if not 0 <= coordinate < n:
        raise DimensionMismatch(f"coordinate {coordinate} outside dimension {n}")
    upper = tuple(ONE if j == coordinate else None for j in range(n))
    lp = LinearProgram(unit(n, coordinate), 'max', region, upper=upper)
    outcome = solve(lp, certify=False)
    if outcome.status == INFEASIBLE:
        raise EmptyRegion("positivity test on an empty region")
    if outcome.status == OPTIMAL and outcome.value > 0:
        return CanBePositive(outcome.primal)
    return StuckAtZero()


def maximal_positive_point(region, coordinates):
    """
    A point of the region where every coordinate that can be positive on the
    region is positive, and the set of coordinates stuck at zero.

    The average of the individual positivity witnesses stays in the convex region
    and is positive on each tested coordinate at once.
    """
    witnesses, stuck = [], set()
    for k in coordinates:
        outcome = sup_positive(region, k)
        if isinstance(outcome, CanBePositive):
            witnesses.append(outcome.witness)
        else:
            stuck.add(k)
    if not witnesses:
        point = feasible_point(region)
        if point is None:
            raise EmptyRegion("no point in the region")
        return point, stuck
    count = len(witnesses)
    point = tuple(sum(ws, ZERO) / count for ws in zip(*witnesses))
    return point, stuck


def program(objective, sense, inequalities=(), equalities=(), lower=None, upper=None):
    """Convenience constructor from plain lists; rationals may be ints or 'p/q' strings"""
    objective = vec(objective)
    constraints = HRep.build(len(objective), inequalities, equalities)
    lo = None if lower is None else tuple(None if b is None else to_fraction(b) for b in lower)
    up = None if upper is None else tuple(None if b is None else to_fraction(b) for b in upper)
    return LinearProgram(objective, sense, constraints, lo, up)


class ProgramBuilder:
    """
    Assembles a program from variable blocks and sparse rows.

    Rows are dicts {variable index: coefficient}; `place` copies an
    H-representation onto a block, optionally homogenized by a scale variable
    (row.z <= scale * rhs).
    """

    def __init__(self):
        self.size = 0
        self._ineq = []
        self._eqs = []

    def block(self, k, nonnegative=False):
        indices = range(self.size, self.size + k)
        self.size += k
        if nonnegative:
            for j in indices:
                self.le({j: -ONE}, ZERO)
        return indices

    def le(self, coeffs, rhs):
        self._ineq.append((dict(coeffs), to_fraction(rhs)))

    def eq(self, coeffs, rhs):
        self._eqs.append((dict(coeffs), to_fraction(rhs)))

    def fix(self, indices, values):
        for j, value in zip(indices, values):
            self.eq({j: ONE}, value)

    def place(self, indices, h, scale=None):
        if len(indices) != h.dim:
            raise DimensionMismatch(f"block of {len(indices)} variables for a representation of dimension {h.dim}")
        for rows, add_row in ((h.inequalities, self.le), (h.equalities, self.eq)):
            for row, rhs in rows:
                coeffs = {j: c for j, c in zip(indices, row) if c}
                if scale is None:
                    add_row(coeffs, rhs)
                else:
                    if rhs:
                        coeffs[scale] = coeffs.get(scale, ZERO) - rhs
                    add_row(coeffs, ZERO)

    def _dense(self, coeffs):
        row = [ZERO] * self.size
        for j, c in coeffs.items():
            row[j] += c
        return tuple(row)

    def region(self):
        return HRep(
            self.size,
            tuple((self._dense(c), rhs) for c, rhs in self._ineq),
            tuple((self._dense(c), rhs) for c, rhs in self._eqs),
        )

    def program(self, objective=None, sense='min', upper=None):
        objective = self._dense(objective or {})
        bounds = None
        if upper:
            bounds = tuple(upper.get(j) for j in range(self.size))
        return LinearProgram(objective, sense, self.region(), upper=bounds)


def shrink_to_positive(build, candidates, cap, what='active-set candidates'):
    """
    Largest subset S of `candidates` whose scale variables can all be positive.

    build(S) returns (region, {candidate: variable index}). Subsets admitting
    positive variables are closed under union, so coordinates stuck at zero are
    dropped until none remain. Returns (point, S, variables) or None when a
    restricted region is empty.
    """
    active = list(candidates)
    rounds = 0
    while True:
        rounds += 1
        if rounds > cap:
            raise ResourceLimitExceeded(what, cap)
        region, variables = build(active)
        if feasible_point(region) is None:
            logger.debug(f"Restricted region empty after {rounds} rounds")
            return None
        point, stuck = maximal_positive_point(region, sorted(variables[c] for c in active))
        if not stuck:
            return point, active, variables
        active = [c for c in active if variables[c] not in stuck]

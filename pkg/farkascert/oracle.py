"""
Brute-force cross-checks that never touch the conic machinery.

Samples are exact rationals drawn from seeded numpy streams: random convex
combinations of vertices plus ray steps 2^k (k = 0..10) along recession
directions. The oracle refutes verdicts, it never proves them.
"""

import dataclasses
import logging
import math
from fractions import Fraction

import numpy as np

from farkascert import convexfn, ratgeom
from farkascert.errors import InconsistentSystem, SolverError
from farkascert.ratgeom import add, dot, scale, vec

logger = logging.getLogger(__name__)

MAX_STEP_EXPONENT = 10

NO_VIOLATION = 'NoViolationFound'
VIOLATION = 'Violation'


@dataclasses.dataclass(frozen=True)
class SampleCloud:
    seed: int
    points: tuple
    provenance: str
    feasible: tuple = ()
    walks: tuple = ()

    def __len__(self):
        return len(self.points)


def _stream(seed, count):
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def _random_point(rng, v):
    weights = [int(w) for w in rng.integers(1, 9, size=len(v.points))]
    total = sum(weights)
    x = ratgeom.zeros(v.dim)
    for w, p in zip(weights, v.points):
        x = add(x, scale(Fraction(w, total), p))
    for r in v.rays:
        if rng.random() < 0.5:
            x = add(x, scale(2 ** int(rng.integers(0, MAX_STEP_EXPONENT + 1)), r))
    for line in v.lineality:
        if rng.random() < 0.5:
            sign = 1 if rng.random() < 0.5 else -1
            x = add(x, scale(sign * 2 ** int(rng.integers(0, MAX_STEP_EXPONENT + 1)), line))
    return x


def _sample_polyhedron(p, count, seed):
    v = p.v
    points = list(v.points)[:count]
    for rng in _stream(seed, count - len(points)):
        points.append(_random_point(rng, v))
    return points


def _walks(p):
    """Ray walks p + 2^k r from every vertex, in both directions along lines"""
    v = p.v
    directions = list(v.rays) + [d for line in v.lineality for d in (line, ratgeom.neg(line))]
    return tuple(
        tuple(add(point, scale(2 ** k, d)) for k in range(MAX_STEP_EXPONENT + 1))
        for point in v.points for d in directions
    )


def is_feasible(sigma, x):
    """Direct evaluation: x in C and every f_i(x) <= 0"""
    return ratgeom.contains(sigma.c, x) and all(convexfn.evaluate(g, x) <= 0 for _, g in sigma.constraints)


def sample_feasible(sigma, count, seed):
    """Points of the solution set A, each re-checked by direct evaluation"""
    a = sigma.a
    if a.is_empty():
        raise InconsistentSystem("cannot sample the solution set of an inconsistent system")
    points = _sample_polyhedron(a, count, seed)
    for x in points:
        if not is_feasible(sigma, x):
            raise SolverError(f"sampled point {ratgeom.fmt(x)} fails direct evaluation")
    logger.debug(f"Sampled {len(points)} feasible points with seed {seed}")
    return SampleCloud(seed, tuple(points), 'feasible-region', tuple(True for _ in points), _walks(a))


def sample_domain(f, count, seed):
    """Points of dom f: its vertices first, then random combinations and ray steps"""
    dom = convexfn.domain(f)
    points = _sample_polyhedron(dom, count, seed)
    return SampleCloud(seed, tuple(points), 'domain',
                       tuple(convexfn.evaluate(f, x) != math.inf for x in points), _walks(dom))


def box_grid(n, radius, denominator=1, seed=0):
    """Every point of Q^n with coordinates k/denominator in [-radius, radius]"""
    ticks = [Fraction(k, denominator) for k in range(-radius * denominator, radius * denominator + 1)]
    grid = [()]
    for _ in range(n):
        grid = [g + (t,) for g in grid for t in ticks]
    return SampleCloud(seed, tuple(grid), 'box-grid')


@dataclasses.dataclass(frozen=True)
class OracleVerdict:
    status: str
    x: tuple = None


def oracle_consequence(f, x_star, s, sigma, cloud):
    """Check f(x) - <x*, x> >= s at every sample of the solution set"""
    x_star, s = vec(x_star), ratgeom.to_fraction(s)
    for x in cloud.points:
        value = convexfn.evaluate(f, x)
        if value != math.inf and value - dot(x_star, x) < s:
            return OracleVerdict(VIOLATION, x)
    return OracleVerdict(NO_VIOLATION)


@dataclasses.dataclass(frozen=True)
class ConjugateEstimate:
    value: object
    unbounded: bool = False


def oracle_conjugate(f, grid, cloud):
    """
    For each dual point y, the largest <y, x> - f(x) over the primal cloud points.

    The estimate is flagged unbounded when the value still increases at the
    largest step of some ray walk of the primal cloud.
    """
    estimates = {}
    for y in grid.points:
        best = None
        for x in cloud.points:
            fx = convexfn.evaluate(f, x)
            if fx == math.inf:
                continue
            value = dot(y, x) - fx
            if best is None or value > best:
                best = value
        unbounded = False
        for walk in cloud.walks:
            tail = [convexfn.evaluate(f, x) for x in walk[-2:]]
            if math.inf in tail:
                continue
            if dot(y, walk[-1]) - tail[1] > dot(y, walk[-2]) - tail[0]:
                unbounded = True
                break
        estimates[tuple(y)] = ConjugateEstimate(best if best is not None else -math.inf, unbounded)
    return estimates

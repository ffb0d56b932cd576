"""
Named instances and seeded random generators.

The named instances are the regression fixtures used by selftest, the CLI
problem files and the tests; the generators build the randomized corpora.
"""

import dataclasses
import logging
from fractions import Fraction

import numpy as np

from farkascert import convexfn, farkas, optimal, ratgeom
from farkascert.ratgeom import Polyhedron, add, dot, scale, vec, zeros

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Named instances
# ---------------------------------------------------------------------------

def example1():
    """
    f(u,v) = -u on {u >= 0, v = u}, f_1 = indicator of {u >= 0, v = u + 1}, C = Q^2.

    The solution set {(0,1)} + Q+(1,1) misses dom f although the system is FM.
    """
    ray = Polyhedron.from_inequalities(2, [((-1, 0), 0)], [((-1, 1), 0)])
    f = convexfn.affine_on((-1, 0), 0, ray)
    shifted = Polyhedron.from_inequalities(2, [((-1, 0), 0)], [((-1, 1), 1)])
    sigma = farkas.ConvexSystem(2, constraints=[('f1', convexfn.indicator(shifted))])
    return f, sigma


def not_fm():
    """f_1(x1, x2) = x1 on the axis x2 = 0, C = Q^2: consistent, but K is not closed"""
    axis = Polyhedron.from_inequalities(2, [], [((0, 1), 0)])
    sigma = farkas.ConvexSystem(2, constraints=[('f1', convexfn.affine_on((1, 0), 0, axis))])
    return convexfn.zero(2), sigma


def infeasible_pair():
    """x + 1 <= 0 and -x + 1 <= 0 on Q"""
    sigma = farkas.ConvexSystem(1, constraints=[
        ('f1', convexfn.affine((1,), 1)),
        ('f2', convexfn.affine((-1,), 1)),
    ])
    return convexfn.zero(1), sigma


def halfline():
    """f(x) = -x subject to x - 1 <= 0 on Q"""
    sigma = farkas.ConvexSystem(1, constraints=[('f1', convexfn.affine((1,), -1))])
    return convexfn.affine((-1,), 0), sigma


def kkt_abs():
    """min |x1 - 2| subject to x1 - 1 <= 0 on Q^2, optimal at (1, 0)"""
    f = convexfn.max_affine([((1, 0), -2), ((-1, 0), 2)])
    sigma = farkas.ConvexSystem(2, constraints=[('f1', convexfn.affine((1, 0), -1))])
    return optimal.PerturbedProblem(sigma, f, zeros(2)), vec((1, 0))


# ---------------------------------------------------------------------------
# Random corpora
# ---------------------------------------------------------------------------

def _ints(rng, low, high, size):
    return tuple(int(v) for v in rng.integers(low, high + 1, size=size))


def random_vector(rng, n, low=-2, high=2):
    return vec(_ints(rng, low, high, n))


def _nonzero_ints(rng, low, high, size):
    while True:
        a = _ints(rng, low, high, size)
        if any(a):
            return a


def random_polyhedron(rng, n, around, bounded=False):
    """A polyhedron containing the point `around`, a box when bounded"""
    rows = []
    if bounded:
        for k in range(n):
            width = int(rng.integers(1, 4))
            e = ratgeom.unit(n, k)
            rows.append((e, around[k] + width))
            rows.append((ratgeom.neg(e), -around[k] + width))
    else:
        for _ in range(int(rng.integers(1, n + 2))):
            a = _nonzero_ints(rng, -2, 2, n)
            rows.append((vec(a), dot(vec(a), around) + int(rng.integers(0, 3))))
    return Polyhedron.from_inequalities(n, rows)


def random_function(rng, n, around=None, finite=True):
    """max of 1-3 affine pieces; when not finite, restricted to a polyhedron containing `around`"""
    pieces = [(_ints(rng, -2, 2, n), int(rng.integers(-3, 4))) for _ in range(int(rng.integers(1, 4)))]
    f = convexfn.max_affine(pieces)
    if finite:
        return f
    around = around if around is not None else zeros(n)
    return convexfn.add_indicator(f, random_polyhedron(rng, n, around))


def _constraint_through(rng, n, x0):
    """A function with f(x0) <= 0"""
    kind = int(rng.integers(0, 3))
    pieces = []
    for _ in range(int(rng.integers(1, 3))):
        a = vec(_ints(rng, -2, 2, n))
        pieces.append((a, -dot(a, x0) - int(rng.integers(0, 3))))
    g = convexfn.max_affine(pieces)
    if kind == 2:
        g = convexfn.add_indicator(g, random_polyhedron(rng, n, x0))
    return g


def random_consistent_system(rng, n, m):
    """m constraints and a set C, all satisfied at a random integer point"""
    x0 = vec(_ints(rng, -2, 2, n))
    c = random_polyhedron(rng, n, x0, bounded=bool(rng.integers(0, 2))) if rng.integers(0, 2) else None
    constraints = [(f'f{i + 1}', _constraint_through(rng, n, x0)) for i in range(m)]
    return farkas.ConvexSystem(n, c, constraints), x0


def random_inconsistent_system(rng, n, m):
    """A consistent system plus two affine constraints that contradict each other"""
    sigma, x0 = random_consistent_system(rng, n, max(0, m - 2))
    a = vec(_nonzero_ints(rng, -2, 2, n))
    b = int(rng.integers(-3, 4))
    gap = int(rng.integers(1, 4))
    constraints = list(sigma.constraints) + [
        ('g1', convexfn.affine(a, b)),
        ('g2', convexfn.affine(ratgeom.neg(a), -b + gap)),
    ]
    return farkas.ConvexSystem(n, sigma.c, constraints)


def random_hidden_pair(rng, n, m, fails):
    """(f, sigma) where the solution set meets dom f, or misses it when `fails`"""
    sigma, x0 = random_consistent_system(rng, n, m)
    cut = vec(_nonzero_ints(rng, -2, 2, n))
    level = dot(cut, x0) + int(rng.integers(0, 3))
    constraints = list(sigma.constraints) + [('cut', convexfn.affine(cut, -level))]
    sigma = farkas.ConvexSystem(n, sigma.c, constraints)
    slope = _ints(rng, -2, 2, n)
    if fails:
        region = Polyhedron.from_inequalities(n, [(ratgeom.neg(cut), -level - int(rng.integers(1, 3)))])
    else:
        region = Polyhedron.from_inequalities(n, [(cut, level)])
    return convexfn.affine_on(slope, int(rng.integers(-2, 3)), region), sigma


@dataclasses.dataclass(frozen=True)
class ForwardCertificate:
    f: convexfn.PolyhedralFunction
    sigma: farkas.ConvexSystem
    x_star: tuple
    s: Fraction
    lambdas: dict


def _dual_point(rng, p):
    """Random point of a nonempty polyhedron from its generators"""
    v = p.v
    weights = [int(w) for w in rng.integers(1, 5, size=len(v.points))]
    total = sum(weights)
    x = zeros(p.dim)
    for w, point in zip(weights, v.points):
        x = add(x, scale(Fraction(w, total), point))
    for r in v.rays:
        x = add(x, scale(int(rng.integers(0, 3)), r))
    for line in v.lineality:
        x = add(x, scale(int(rng.integers(-2, 3)), line))
    return x


def forward_certificate(rng, n, m):
    """
    A query built from its certificate: random multipliers and conjugate points
    give x* = u* + v* + sum lambda_j u_j and s = -(f*(u*) + support_C(v*) + sum lambda_j f_j*(u_j)).
    """
    sigma, _ = random_consistent_system(rng, n, m)
    f = random_function(rng, n)
    u_star = _dual_point(rng, convexfn.domain(convexfn.conjugate(f)))
    v_star = _dual_point(rng, farkas.barrier_cone(sigma))
    x_star = add(u_star, v_star)
    bound = convexfn.evaluate(convexfn.conjugate(f), u_star) + convexfn.support_eval(sigma.c, v_star)
    lambdas = {}
    for name, g in sigma.constraints:
        if rng.integers(0, 2):
            continue
        lam = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 3)))
        g_star = convexfn.conjugate(g)
        u = _dual_point(rng, convexfn.domain(g_star))
        x_star = add(x_star, scale(lam, u))
        bound += lam * convexfn.evaluate(g_star, u)
        lambdas[name] = lam
    return ForwardCertificate(f, sigma, x_star, -bound, lambdas)


def rng_for(seed, stream=0):
    """Deterministic generator for stream `stream` of a master seed"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))

"""
Polyhedral convex functions.

A PolyhedralFunction on Q^n is stored as its epigraph, a Polyhedron in Q^(n+1)
whose last coordinate is the value t. Conjugates are computed from the
V-representation of the epigraph and memoized per function.
"""

import logging
import math
import threading

from farkascert import ratgeom
from farkascert.errors import DimensionMismatch, EmptyOperand, ImproperFunction, ImproperSum, PointOutsideDomain
from farkascert.ratgeom import HRep, ONE, Polyhedron, ZERO, check_dim, dot, is_zero, to_fraction, vec, zeros

logger = logging.getLogger(__name__)

INF = math.inf


def _check_epigraph(n, epi):
    if epi.dim != n + 1:
        raise DimensionMismatch(f"epigraph of dimension {epi.dim} for a function on Q^{n}")
    h = epi.h
    if any(row[n] > 0 for row, _ in h.inequalities):
        raise ImproperFunction("epigraph row with positive t-coefficient: the vertical ray (0,...,0,1) is not a direction")
    if any(row[n] != 0 for row, _ in h.equalities):
        raise ImproperFunction("epigraph equality involving t: the set is not closed upwards")
    if epi.is_empty():
        raise ImproperFunction("empty epigraph")
    if not any(row[n] < 0 for row, _ in h.inequalities):
        raise ImproperFunction("the epigraph contains a vertical line: the function takes the value -inf")


class PolyhedralFunction:
    """Proper lsc polyhedral convex function on Q^n, held as its epigraph"""

    def __init__(self, n, epi):
        _check_epigraph(n, epi)
        self.n = n
        self.epi = epi
        self._conjugate = None
        self._lock = threading.Lock()

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        return f"PolyhedralFunction(n={self.n}, epi={self.epi!r})"


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _lift_rows(rows, tcoef=ZERO):
    return tuple((row + (tcoef,), rhs) for row, rhs in rows)


def affine(a, b):
    """x -> a.x + b"""
    a, b = vec(a), to_fraction(b)
    n = len(a)
    return PolyhedralFunction(n, Polyhedron.from_h(HRep(n + 1, ((a + (-ONE,), -b),))))


def zero(n):
    return affine(zeros(n), 0)


def max_affine(pieces):
    """x -> max over (a, b) in pieces of a.x + b"""
    pieces = [(vec(a), to_fraction(b)) for a, b in pieces]
    if not pieces:
        raise ImproperFunction("max_affine needs at least one piece")
    n = len(pieces[0][0])
    for a, _ in pieces:
        check_dim(a, n, 'affine piece')
    rows = tuple((a + (-ONE,), -b) for a, b in pieces)
    return PolyhedralFunction(n, Polyhedron.from_h(HRep(n + 1, rows)))


def indicator(p):
    """0 on p, +inf outside"""
    if p.is_empty():
        raise ImproperFunction("indicator of the empty set")
    n = p.dim
    h = p.h
    rows = _lift_rows(h.inequalities) + ((zeros(n) + (-ONE,), ZERO),)
    return PolyhedralFunction(n, Polyhedron.from_h(HRep(n + 1, rows, _lift_rows(h.equalities))))


def affine_on(a, b, p):
    """a.x + b on p, +inf outside"""
    a, b = vec(a), to_fraction(b)
    check_dim(a, p.dim, 'slope')
    if p.is_empty():
        raise ImproperFunction("affine_on over the empty set")
    n = p.dim
    h = p.h
    rows = _lift_rows(h.inequalities) + ((a + (-ONE,), -b),)
    return PolyhedralFunction(n, Polyhedron.from_h(HRep(n + 1, rows, _lift_rows(h.equalities))))


def raw_epigraph(h):
    """Function whose epigraph is the given H-representation in Q^(n+1)"""
    return PolyhedralFunction(h.dim - 1, Polyhedron.from_h(h))


_FORMS = {
    'affine': affine,
    'max_affine': max_affine,
    'indicator': indicator,
    'affine_on': affine_on,
    'raw_epigraph': raw_epigraph,
}


def build(form, *args, **kwargs):
    """build('affine', a, b), build('indicator', p), ..."""
    try:
        builder = _FORMS[form]
    except KeyError:
        raise ValueError(f"unknown function form {form!r}, expected one of {sorted(_FORMS)}") from None
    return builder(*args, **kwargs)


# ---------------------------------------------------------------------------
# Evaluation and conjugation
# ---------------------------------------------------------------------------

def evaluate(f, x):
    """f(x) as a Fraction, or math.inf off the domain"""
    check_dim(x, f.n, 'point')
    n = f.n
    h = f.epi.h
    value = None
    for row, rhs in h.inequalities:
        a, c = row[:n], row[n]
        if c == 0:
            if dot(a, x) > rhs:
                return INF
        else:
            bound = (dot(a, x) - rhs) / -c
            if value is None or bound > value:
                value = bound
    for row, rhs in h.equalities:
        if dot(row[:n], x) != rhs:
            return INF
    return value


def conjugate(f):
    """
    f*(y) = sup_x <y,x> - f(x).

    Each point (p, t) of epi f contributes <y,p> - r <= t, each ray (d, s)
    contributes <y,d> <= s and each lineality vector (l, s) gives <y,l> = s.
    """
    with f._lock:
        if f._conjugate is not None:
            return f._conjugate
        n = f.n
        v = f.epi.v
        ineq = [(p[:n] + (-ONE,), p[n]) for p in v.points]
        ineq += [(d[:n] + (ZERO,), d[n]) for d in v.rays if not is_zero(d[:n])]
        eqs = [(l[:n] + (ZERO,), l[n]) for l in v.lineality]
        epi_star = Polyhedron.from_h(HRep(n + 1, tuple(ineq), tuple(eqs)))
        f._conjugate = PolyhedralFunction(n, epi_star)
        logger.debug(f"Conjugate of a function on Q^{n} from {len(v.points)} points and {len(v.rays)} rays")
        return f._conjugate


def domain(f):
    return ratgeom.project(f.epi, range(f.n))


def support_eval(d, a):
    """sup over x in d of <a, x>; math.inf when unbounded"""
    if d.is_empty():
        raise EmptyOperand("support function of the empty set")
    check_dim(a, d.dim, 'direction')
    v = d.v
    if any(dot(a, r) > 0 for r in v.rays) or any(dot(a, l) != 0 for l in v.lineality):
        return INF
    return max(dot(a, p) for p in v.points)


def recession_function(f):
    """f-infinity, with epigraph recc(epi f)"""
    return PolyhedralFunction(f.n, ratgeom.recession_cone(f.epi))


def recession_via_support(f, d):
    """f-infinity(d) computed as the support function of dom f* at d"""
    return support_eval(domain(conjugate(f)), d)


def subdifferential(f, x_bar):
    """{y : f(x_bar) + f*(y) = <y, x_bar>}, as the slice of epi f* along r = <y,x_bar> - f(x_bar)"""
    value = evaluate(f, x_bar)
    if value == INF:
        raise PointOutsideDomain(f"f(x) = +inf at {ratgeom.fmt(x_bar)}")
    n = f.n
    matrix = [ratgeom.unit(n, k) for k in range(n)] + [tuple(x_bar)]
    offset = zeros(n) + (-value,)
    return ratgeom.preimage(conjugate(f).epi, matrix, offset)


def perspective_support(f, x, r):
    """Support function of epi f* at (x, r)"""
    check_dim(x, f.n, 'point')
    return support_eval(conjugate(f).epi, tuple(x) + (to_fraction(r),))


def add_indicator(f, d):
    """f + indicator(d); ImproperSum when dom f and d do not meet"""
    if d.dim != f.n:
        raise DimensionMismatch(f"set of dimension {d.dim} added to a function on Q^{f.n}")
    epi = ratgeom.intersect(f.epi, ratgeom.cylinder(d, 1))
    if epi.is_empty():
        raise ImproperSum("dom f and the set are disjoint, the sum is identically +inf")
    return PolyhedralFunction(f.n, epi)


def sublevel(f, r):
    """[f <= r]"""
    n = f.n
    matrix = [ratgeom.unit(n, k) for k in range(n)] + [zeros(n)]
    return ratgeom.preimage(f.epi, matrix, zeros(n) + (to_fraction(r),))


def indicator_conjugate_epi(c):
    """epi of the support function of c, a closed convex cone"""
    return conjugate(indicator(c)).epi


def same_function(f, g):
    return f.n == g.n and ratgeom.equal(f.epi, g.epi)


def nonnegative_combination(terms, n):
    """x -> sum of w * f(x) over (w, f) in terms, every weight positive"""
    k = len(terms)
    if k == 0:
        return zero(n)
    dim = n + 1 + k
    weights = tuple(to_fraction(w) for w, _ in terms)
    if any(w <= 0 for w in weights):
        raise ValueError("weights of a combination must be positive")
    ineq = [(zeros(n) + (-ONE,) + weights, ZERO)]
    eqs = []
    for i, (_, f) in enumerate(terms):
        if f.n != n:
            raise DimensionMismatch(f"function on Q^{f.n} in a combination on Q^{n}")
        h = f.epi.h
        for rows, target in ((h.inequalities, ineq), (h.equalities, eqs)):
            for row, rhs in rows:
                lifted = row[:n] + (ZERO,) + tuple(row[n] if j == i else ZERO for j in range(k))
                target.append((lifted, rhs))
    joint = Polyhedron.from_h(HRep(dim, tuple(ineq), tuple(eqs)))
    if joint.is_empty():
        raise ImproperSum("the domains of the combined functions do not meet")
    return PolyhedralFunction(n, ratgeom.project(joint, range(n + 1)))

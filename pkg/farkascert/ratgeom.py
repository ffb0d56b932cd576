"""
Exact rational polyhedral geometry.

Vectors are tuples of Fraction. A Polyhedron keeps an H-representation
(inequalities row.x <= rhs, equalities row.x = rhs), a V-representation
(points, rays, lineality) or both; the missing one is computed on demand by the
double description method and memoized under a per-instance lock.
"""

import dataclasses
import logging
import math
import threading
from fractions import Fraction

from farkascert import config
from farkascert.errors import DimensionMismatch, EmptyOperand, ResourceLimitExceeded

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Scalars and vectors
# ---------------------------------------------------------------------------

def to_fraction(value):
    """Parse an int, Fraction or "p/q" string; floats are refused"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an int, Fraction or 'p/q' string, got {type(value).__name__}")


def vec(values):
    return tuple(to_fraction(v) for v in values)


def zeros(n):
    return (ZERO,) * n


def unit(n, k):
    return tuple(ONE if i == k else ZERO for i in range(n))


def check_dim(a, n, what='vector'):
    if len(a) != n:
        raise DimensionMismatch(f"{what} has length {len(a)}, expected {n}")


def dot(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"cannot pair vectors of lengths {len(a)} and {len(b)}")
    total = ZERO
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return total


def add(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"cannot add vectors of lengths {len(a)} and {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"cannot subtract vectors of lengths {len(a)} and {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a):
    return tuple(c * x for x in a)


def neg(a):
    return tuple(-x for x in a)


def is_zero(a):
    return all(x == 0 for x in a)


def vsum(vectors, n):
    total = zeros(n)
    for v in vectors:
        total = add(total, v)
    return total


def primitive(a):
    """Positive multiple of `a` with integer entries of gcd 1 (zero stays zero)"""
    if is_zero(a):
        return tuple(ZERO for _ in a)
    lcm = 1
    for x in a:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in a]
    g = 0
    for k in ints:
        g = math.gcd(g, k)
    return tuple(Fraction(k // g) for k in ints)


def canonical_line(a):
    """Primitive form with the first nonzero entry positive (for lines, not rays)"""
    p = primitive(a)
    for x in p:
        if x != 0:
            return p if x > 0 else neg(p)
    return p


def rref(rows):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)"""
    m = [list(r) for r in rows]
    pivots = []
    if not m:
        return [], pivots
    width = len(m[0])
    lead = 0
    for col in range(width):
        pivot_row = next((i for i in range(lead, len(m)) if m[i][col] != 0), None)
        if pivot_row is None:
            continue
        m[lead], m[pivot_row] = m[pivot_row], m[lead]
        inv = ONE / m[lead][col]
        m[lead] = [x * inv for x in m[lead]]
        for i in range(len(m)):
            if i != lead and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[lead])]
        pivots.append(col)
        lead += 1
        if lead == len(m):
            break
    return [tuple(r) for r in m[:lead]], pivots


def reduce_modulo(basis_rref, pivots, v):
    """Canonical representative of v + span(basis), zero at every pivot column"""
    out = list(v)
    for row, col in zip(basis_rref, pivots):
        if out[col] != 0:
            factor = out[col]
            out = [x - factor * y for x, y in zip(out, row)]
    return tuple(out)


def fmt(a):
    return '(' + ', '.join(str(x) for x in a) + ')'


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class HRep:
    """{x : row.x <= rhs for every inequality, row.x = rhs for every equality}"""
    dim: int
    inequalities: tuple = ()
    equalities: tuple = ()

    def __post_init__(self):
        for row, _ in self.inequalities + self.equalities:
            check_dim(row, self.dim, 'constraint row')

    @classmethod
    def build(cls, dim, inequalities=(), equalities=()):
        return cls(
            dim,
            tuple((vec(row), to_fraction(rhs)) for row, rhs in inequalities),
            tuple((vec(row), to_fraction(rhs)) for row, rhs in equalities),
        )

    def satisfied_by(self, x):
        check_dim(x, self.dim, 'point')
        return (all(dot(row, x) <= rhs for row, rhs in self.inequalities)
                and all(dot(row, x) == rhs for row, rhs in self.equalities))

    def direction_ok(self, d):
        """d lies in the recession cone of the represented set"""
        return (all(dot(row, d) <= 0 for row, _ in self.inequalities)
                and all(dot(row, d) == 0 for row, _ in self.equalities))

    def line_ok(self, d):
        return all(dot(row, d) == 0 for row, _ in self.inequalities + self.equalities)


@dataclasses.dataclass(frozen=True)
class VRep:
    """conv(points) + cone(rays) + span(lineality); empty iff there are no points"""
    dim: int
    points: tuple = ()
    rays: tuple = ()
    lineality: tuple = ()

    def __post_init__(self):
        for g in self.points + self.rays + self.lineality:
            check_dim(g, self.dim, 'generator')
        for g in self.rays + self.lineality:
            if is_zero(g):
                raise ValueError("rays and lineality vectors must be nonzero")

    @classmethod
    def build(cls, dim, points=(), rays=(), lineality=()):
        return cls(
            dim,
            tuple(vec(p) for p in points),
            tuple(vec(r) for r in rays if not is_zero(vec(r))),
            tuple(vec(l) for l in lineality if not is_zero(vec(l))),
        )


# ---------------------------------------------------------------------------
# Double description
# ---------------------------------------------------------------------------

def cone_generators(dim, inequalities, equalities=()):
    """
    Extreme rays and a lineality basis of {y : a.y <= 0 (a in inequalities), e.y = 0}.

    Incremental double description with the combinatorial adjacency test; zero
    sets are kept as integer bitmasks over the rows processed so far.
    """
    cap = config.current().max_generators
    lineality = [unit(dim, k) for k in range(dim)]
    rays = []  # (vector, zero-set bitmask)
    rows = [(row, True) for row in equalities] + [(row, False) for row in inequalities]

    for idx, (row, is_equality) in enumerate(rows):
        check_dim(row, dim, 'cone row')
        bit = 1 << idx
        values = [dot(row, l) for l in lineality]
        pivot = next((k for k, val in enumerate(values) if val != 0), None)

        if pivot is not None:
            l0, v0 = lineality[pivot], values[pivot]
            if v0 > 0:
                l0, v0 = neg(l0), -v0
            new_lineality = []
            for k, l in enumerate(lineality):
                if k == pivot:
                    continue
                val = values[k]
                new_lineality.append(l if val == 0 else sub(l, scale(val / v0, l0)))
            new_rays = []
            for r, z in rays:
                val = dot(row, r)
                r2 = r if val == 0 else primitive(sub(r, scale(val / v0, l0)))
                new_rays.append((r2, z | bit))
            if not is_equality:
                new_rays.append((primitive(l0), bit - 1))
            lineality, rays = new_lineality, new_rays
        else:
            positive, kept, negative = [], [], []
            for k, (r, z) in enumerate(rays):
                val = dot(row, r)
                if val > 0:
                    positive.append((k, r, z, val))
                elif val < 0:
                    negative.append((k, r, z, val))
                else:
                    kept.append((r, z | bit))
            if not is_equality:
                kept.extend((r, z) for _, r, z, _ in negative)
            masks = [z for _, z in rays]
            combined = []
            for kp, rp, zp, vp in positive:
                for kq, rq, zq, vq in negative:
                    common = zp & zq
                    adjacent = not any(
                        z & common == common
                        for k, z in enumerate(masks) if k != kp and k != kq
                    )
                    if adjacent:
                        new = primitive(sub(scale(vp, rq), scale(vq, rp)))
                        if not is_zero(new):
                            combined.append((new, common | bit))
            rays = kept + combined

        if len(rays) + len(lineality) > cap:
            raise ResourceLimitExceeded('double description generators', cap)

    return [r for r, _ in rays], lineality


def h_to_v(h):
    """Minimal V-representation of an H-represented polyhedron"""
    n = h.dim
    ineq = [row + (-rhs,) for row, rhs in h.inequalities]
    ineq.append(zeros(n) + (-ONE,))
    eqs = [row + (-rhs,) for row, rhs in h.equalities]
    rays, lineality = cone_generators(n + 1, ineq, eqs)

    points, directions = [], []
    for r in rays:
        t = r[n]
        if t > 0:
            points.append(tuple(x / t for x in r[:n]))
        else:
            directions.append(r[:n])
    if not points:
        return VRep(n)

    lines = [l[:n] for l in lineality if not is_zero(l[:n])]
    basis, pivots = rref(lines)
    points = [reduce_modulo(basis, pivots, p) for p in points]
    directions = [primitive(reduce_modulo(basis, pivots, d)) for d in directions]
    directions = [d for d in directions if not is_zero(d)]
    lines = [canonical_line(b) for b in basis]
    logger.debug(f"H->V in dimension {n}: {len(points)} points, {len(directions)} rays, {len(lines)} lines")
    return VRep(n, tuple(sorted(set(points))), tuple(sorted(set(directions))), tuple(lines))


def v_to_h(v):
    """Irredundant H-representation of a V-represented polyhedron"""
    n = v.dim
    if not v.points:
        return HRep(n, ((zeros(n), -ONE),))
    gens = [p + (ONE,) for p in v.points] + [r + (ZERO,) for r in v.rays]
    eqs = [l + (ZERO,) for l in v.lineality]
    facets, implicit = cone_generators(n + 1, gens, eqs)

    inequalities = []
    for c in facets:
        a, ct = c[:n], c[n]
        if is_zero(a):
            continue
        inequalities.append((a, -ct))
    equalities = []
    basis, _ = rref([c for c in implicit])
    for c in basis:
        c = canonical_line(c)
        equalities.append((c[:n], -c[n]))
    return HRep(n, tuple(sorted(set(inequalities))), tuple(equalities))


# ---------------------------------------------------------------------------
# Polyhedron
# ---------------------------------------------------------------------------

class Polyhedron:
    """Closed convex polyhedron in Q^dim with lazily converted representations"""

    def __init__(self, dim, h=None, v=None):
        if h is None and v is None:
            raise ValueError("a polyhedron needs at least one representation")
        for rep in (h, v):
            if rep is not None and rep.dim != dim:
                raise DimensionMismatch(f"representation of dimension {rep.dim} given for dimension {dim}")
        self.dim = dim
        self._h = h
        self._v = v
        self._lock = threading.Lock()

    @classmethod
    def from_h(cls, h):
        return cls(h.dim, h=h)

    @classmethod
    def from_v(cls, v):
        return cls(v.dim, v=v)

    @classmethod
    def from_inequalities(cls, dim, inequalities=(), equalities=()):
        return cls.from_h(HRep.build(dim, inequalities, equalities))

    @classmethod
    def from_generators(cls, dim, points=(), rays=(), lineality=()):
        return cls.from_v(VRep.build(dim, points, rays, lineality))

    @property
    def has_h(self):
        return self._h is not None

    @property
    def has_v(self):
        return self._v is not None

    @property
    def h(self):
        with self._lock:
            if self._h is None:
                self._h = v_to_h(self._v)
            return self._h

    @property
    def v(self):
        with self._lock:
            if self._v is None:
                self._v = h_to_v(self._h)
            return self._v

    def is_empty(self):
        return not self.v.points

    def __repr__(self):
        if self.has_v:
            v = self._v
            return (f"Polyhedron(dim={self.dim}, points={len(v.points)}, "
                    f"rays={len(v.rays)}, lineality={len(v.lineality)})")
        h = self._h
        return f"Polyhedron(dim={self.dim}, inequalities={len(h.inequalities)}, equalities={len(h.equalities)})"


def whole_space(n):
    return Polyhedron(n, h=HRep(n), v=VRep(n, (zeros(n),), (), tuple(unit(n, k) for k in range(n))))


def origin(n):
    return Polyhedron.from_v(VRep(n, (zeros(n),)))


def empty(n):
    return Polyhedron(n, h=HRep(n, ((zeros(n), -ONE),)), v=VRep(n))


def _require_nonempty(p, what):
    if p.is_empty():
        raise EmptyOperand(f"{what} needs a nonempty polyhedron")


def _same_dim(p, q):
    if p.dim != q.dim:
        raise DimensionMismatch(f"polyhedra of dimensions {p.dim} and {q.dim}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def convert(p, target):
    """Return a polyhedron equal to p with the target ('H' or 'V') representation populated, irredundant"""
    if target not in ('H', 'V'):
        raise ValueError(f"target must be 'H' or 'V', got {target!r}")
    v = p.v
    if target == 'V':
        return Polyhedron(p.dim, h=p._h, v=v)
    return Polyhedron(p.dim, h=v_to_h(v), v=v)


def contains(p, x):
    check_dim(x, p.dim, 'point')
    return p.h.satisfied_by(x)


def contains_direction(p, d):
    """d in the recession cone of a nonempty p"""
    check_dim(d, p.dim, 'direction')
    return p.h.direction_ok(d)


def minkowski_sum(p, q):
    _same_dim(p, q)
    _require_nonempty(p, 'minkowski_sum')
    _require_nonempty(q, 'minkowski_sum')
    pv, qv = p.v, q.v
    points = sorted({add(a, b) for a in pv.points for b in qv.points})
    rays = sorted(set(pv.rays) | set(qv.rays))
    lines = list(dict.fromkeys(pv.lineality + qv.lineality))
    return Polyhedron.from_v(VRep(p.dim, tuple(points), tuple(rays), tuple(lines)))


def minkowski_sum_all(polyhedra, n):
    total = origin(n)
    for p in polyhedra:
        total = minkowski_sum(total, p)
    return total


def intersect(p, q):
    _same_dim(p, q)
    ph, qh = p.h, q.h
    return Polyhedron.from_h(HRep(p.dim, ph.inequalities + qh.inequalities, ph.equalities + qh.equalities))


def intersect_all(polyhedra, n):
    ineq, eqs = [], []
    for p in polyhedra:
        if p.dim != n:
            raise DimensionMismatch(f"polyhedron of dimension {p.dim} in an intersection of dimension {n}")
        ineq.extend(p.h.inequalities)
        eqs.extend(p.h.equalities)
    return Polyhedron.from_h(HRep(n, tuple(ineq), tuple(eqs)))


def product(p, q):
    """p x q in Q^(p.dim + q.dim)"""
    left, right = zeros(q.dim), zeros(p.dim)
    ph, qh = p.h, q.h
    ineq = tuple((row + left, rhs) for row, rhs in ph.inequalities) + \
        tuple((right + row, rhs) for row, rhs in qh.inequalities)
    eqs = tuple((row + left, rhs) for row, rhs in ph.equalities) + \
        tuple((right + row, rhs) for row, rhs in qh.equalities)
    return Polyhedron.from_h(HRep(p.dim + q.dim, ineq, eqs))


def cylinder(p, k=1):
    """p x Q^k"""
    return product(p, whole_space(k))


def preimage(p, matrix, offset):
    """{y : M y + c in p} for M given as p.dim rows of equal length"""
    if len(matrix) != p.dim or len(offset) != p.dim:
        raise DimensionMismatch(f"affine map has {len(matrix)} rows, polyhedron dimension is {p.dim}")
    m = len(matrix[0]) if matrix else 0
    columns = [tuple(matrix[i][j] for i in range(p.dim)) for j in range(m)]

    def pull(row, rhs):
        return tuple(dot(row, col) for col in columns), rhs - dot(row, offset)

    h = p.h
    return Polyhedron.from_h(HRep(
        m,
        tuple(pull(row, rhs) for row, rhs in h.inequalities),
        tuple(pull(row, rhs) for row, rhs in h.equalities),
    ))


def substitute(p, index, value):
    """Slice {y in Q^(dim-1) : (y with value inserted at index) in p}"""
    if not 0 <= index < p.dim:
        raise DimensionMismatch(f"coordinate {index} outside dimension {p.dim}")
    m = p.dim - 1
    matrix, offset = [], []
    for k in range(p.dim):
        if k == index:
            matrix.append(zeros(m))
            offset.append(to_fraction(value))
        else:
            matrix.append(unit(m, k if k < index else k - 1))
            offset.append(ZERO)
    return preimage(p, matrix, tuple(offset))


def recession_cone(p):
    _require_nonempty(p, 'recession_cone')
    h = p.h
    return Polyhedron.from_h(HRep(
        p.dim,
        tuple((row, ZERO) for row, _ in h.inequalities),
        tuple((row, ZERO) for row, _ in h.equalities),
    ))


def polar(p):
    """{y : <y, x> <= 0 for all x in p}"""
    _require_nonempty(p, 'polar')
    v = p.v
    ineq = tuple((g, ZERO) for g in v.points + v.rays if not is_zero(g))
    eqs = tuple((l, ZERO) for l in v.lineality)
    return Polyhedron.from_h(HRep(p.dim, ineq, eqs))


def closed_conic_hull(p):
    """cl cone(p): the cone generated by the points and rays of p jointly"""
    _require_nonempty(p, 'closed_conic_hull')
    v = p.v
    rays = sorted({primitive(g) for g in v.points + v.rays if not is_zero(g)})
    return Polyhedron.from_v(VRep(p.dim, (zeros(p.dim),), tuple(rays), v.lineality))


def project(p, keep):
    """Image of p under the coordinate projection onto the indices in `keep` (0-based)"""
    keep = list(keep)
    for k in keep:
        if not 0 <= k < p.dim:
            raise DimensionMismatch(f"coordinate {k} outside dimension {p.dim}")
    _require_nonempty(p, 'project')
    v = p.v

    def pick(g):
        return tuple(g[k] for k in keep)

    points = sorted({pick(g) for g in v.points})
    rays = sorted({primitive(pick(g)) for g in v.rays if not is_zero(pick(g))})
    lines = [pick(g) for g in v.lineality if not is_zero(pick(g))]
    return Polyhedron.from_v(VRep(len(keep), tuple(points), tuple(rays), tuple(lines)))


def _v_inside_h(v, h):
    return (all(h.satisfied_by(x) for x in v.points)
            and all(h.direction_ok(r) for r in v.rays)
            and all(h.line_ok(l) for l in v.lineality))


def equal(p, q):
    _same_dim(p, q)
    p_empty, q_empty = p.is_empty(), q.is_empty()
    if p_empty or q_empty:
        return p_empty and q_empty
    return _v_inside_h(p.v, q.h) and _v_inside_h(q.v, p.h)


def subset(p, q):
    _same_dim(p, q)
    if p.is_empty():
        return True
    return _v_inside_h(p.v, q.h)


def is_irredundant(h):
    """No inequality of h is implied by the remaining rows (checked by LP)"""
    from farkascert import exactlp

    for i, (row, rhs) in enumerate(h.inequalities):
        rest = HRep(h.dim, h.inequalities[:i] + h.inequalities[i + 1:], h.equalities)
        outcome = exactlp.solve(exactlp.LinearProgram(row, 'max', rest), certify=False)
        if outcome.status == exactlp.INFEASIBLE:
            return False
        if outcome.status == exactlp.OPTIMAL and outcome.value <= rhs:
            return False
    return True

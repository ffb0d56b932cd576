"""
JSON problem files.

    {
      "dimension": 2,
      "C": {"inequalities": [{"a": [1, 0], "b": "1/2"}], "equalities": []},
      "constraints": [{"name": "f1", "form": "affine", "a": [1, 0], "b": -1}],
      "objective": {"form": "max_affine", "pieces": [{"a": [1, 0], "b": -2}]},
      "query": {"kind": "consequence", "x_star": [0, 0], "s": 0}
    }

Rationals are integers or "p/q" strings, never floats. Function forms:
affine {a, b}, max_affine {pieces}, indicator {set}, affine_on {a, b, set},
epigraph {inequalities, equalities} with rows of length dimension + 1.
Every parse error names the offending path, e.g. constraints[0].a[1].
"""

import dataclasses
import hashlib
import json
import logging

from farkascert import convexfn, farkas, optimal
from farkascert.errors import FarkasError, ProblemFileError, ResourceLimitExceeded
from farkascert.ratgeom import HRep, Polyhedron, to_fraction

logger = logging.getLogger(__name__)

QUERY_KINDS = ('consequence', 'certify', 'consistency', 'fm', 'hidden', 'optimal', 'kkt', 'diagnose')


@dataclasses.dataclass(frozen=True)
class Problem:
    dimension: int
    sigma: farkas.ConvexSystem
    f: convexfn.PolyhedralFunction
    query: dict
    digest: str
    path: str = None

    def perturbed(self):
        return optimal.PerturbedProblem(self.sigma, self.f, self.query['x_star'])


def _field(obj, key, path, required=True, default=None):
    if not isinstance(obj, dict):
        raise ProblemFileError(path, "expected an object")
    if key not in obj:
        if required:
            raise ProblemFileError(f"{path}.{key}" if path else key, "missing field")
        return default
    return obj[key]


def parse_rational(value, path):
    if isinstance(value, float):
        raise ProblemFileError(path, "floats are not accepted, write an integer or a 'p/q' string")
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ProblemFileError(path, f"expected an integer or 'p/q' string, got {value!r}") from None


def parse_vector(value, path, length):
    if not isinstance(value, list):
        raise ProblemFileError(path, "expected a list of rationals")
    if len(value) != length:
        raise ProblemFileError(path, f"expected {length} entries, got {len(value)}")
    return tuple(parse_rational(v, f"{path}[{k}]") for k, v in enumerate(value))


def _parse_rows(block, key, path, width):
    rows = _field(block, key, path, required=False, default=[])
    if not isinstance(rows, list):
        raise ProblemFileError(f"{path}.{key}", "expected a list of rows")
    parsed = []
    for k, row in enumerate(rows):
        here = f"{path}.{key}[{k}]"
        parsed.append((parse_vector(_field(row, 'a', here), f"{here}.a", width),
                       parse_rational(_field(row, 'b', here), f"{here}.b")))
    return tuple(parsed)


def parse_set(block, path, n):
    """{"inequalities": [{a, b}], "equalities": [{a, b}]} meaning a.x <= b and a.x = b"""
    h = HRep(n, _parse_rows(block, 'inequalities', path, n), _parse_rows(block, 'equalities', path, n))
    return Polyhedron.from_h(h)


def parse_function(block, path, n):
    form = _field(block, 'form', path)
    try:
        if form == 'affine':
            return convexfn.affine(parse_vector(_field(block, 'a', path), f"{path}.a", n),
                                   parse_rational(_field(block, 'b', path), f"{path}.b"))
        if form == 'max_affine':
            pieces = _field(block, 'pieces', path)
            if not isinstance(pieces, list) or not pieces:
                raise ProblemFileError(f"{path}.pieces", "expected a nonempty list")
            parsed = []
            for k, piece in enumerate(pieces):
                here = f"{path}.pieces[{k}]"
                parsed.append((parse_vector(_field(piece, 'a', here), f"{here}.a", n),
                               parse_rational(_field(piece, 'b', here), f"{here}.b")))
            return convexfn.max_affine(parsed)
        if form == 'indicator':
            return convexfn.indicator(parse_set(_field(block, 'set', path), f"{path}.set", n))
        if form == 'affine_on':
            return convexfn.affine_on(parse_vector(_field(block, 'a', path), f"{path}.a", n),
                                      parse_rational(_field(block, 'b', path), f"{path}.b"),
                                      parse_set(_field(block, 'set', path), f"{path}.set", n))
        if form == 'epigraph':
            h = HRep(n + 1, _parse_rows(block, 'inequalities', path, n + 1),
                     _parse_rows(block, 'equalities', path, n + 1))
            return convexfn.raw_epigraph(h)
    except (ProblemFileError, ResourceLimitExceeded):
        raise
    except FarkasError as e:
        raise ProblemFileError(path, str(e)) from e
    raise ProblemFileError(f"{path}.form", f"unknown form {form!r}")


def parse_query(block, path, n):
    kind = _field(block, 'kind', path)
    if kind not in QUERY_KINDS:
        raise ProblemFileError(f"{path}.kind", f"expected one of {', '.join(QUERY_KINDS)}")
    query = {'kind': kind}
    x_star = _field(block, 'x_star', path, required=False)
    query['x_star'] = parse_vector(x_star, f"{path}.x_star", n) if x_star is not None else (to_fraction(0),) * n
    s = _field(block, 's', path, required=False)
    query['s'] = parse_rational(s, f"{path}.s") if s is not None else to_fraction(0)
    if kind in ('optimal', 'kkt'):
        query['x_bar'] = parse_vector(_field(block, 'x_bar', path), f"{path}.x_bar", n)
    return query


def parse_problem(data, digest='', path=None):
    n = _field(data, 'dimension', '')
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFileError('dimension', "expected a positive integer")
    c = None
    if _field(data, 'C', '', required=False) is not None:
        c = parse_set(data['C'], 'C', n)
    constraints = _field(data, 'constraints', '', required=False, default=[])
    if not isinstance(constraints, list):
        raise ProblemFileError('constraints', "expected a list")
    named = []
    for k, block in enumerate(constraints):
        here = f"constraints[{k}]"
        name = _field(block, 'name', here, required=False, default=f"f{k + 1}")
        named.append((str(name), parse_function(block, here, n)))
    objective = _field(data, 'objective', '', required=False)
    f = parse_function(objective, 'objective', n) if objective is not None else convexfn.zero(n)
    query = parse_query(_field(data, 'query', '', required=False, default={'kind': 'diagnose'}), 'query', n)
    try:
        sigma = farkas.ConvexSystem(n, c, named)
    except ResourceLimitExceeded:
        raise
    except (FarkasError, ValueError) as e:
        raise ProblemFileError('constraints', str(e)) from e
    return Problem(n, sigma, f, query, digest, path)


def load_problem(path):
    """Read and parse a problem file; the digest is the sha256 of its bytes"""
    try:
        with open(path, 'rb') as fh:
            raw = fh.read()
    except OSError as e:
        raise ProblemFileError(str(path), f"cannot read file: {e.strerror}") from e
    try:
        data = json.loads(raw.decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ProblemFileError(str(path), f"invalid JSON: {e}") from e
    logger.info(f"Loaded problem file {path}")
    return parse_problem(data, hashlib.sha256(raw).hexdigest(), str(path))

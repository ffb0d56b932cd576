"""
Report rendering: canonical JSON, plain text and a styled workbook.

JSON reports carry rationals as strings, keys sorted and no timestamps, so the
same problem file and seed always produce the same bytes.
"""

import json
import logging
import math
from fractions import Fraction

import openpyxl
from openpyxl.styles import Alignment, Font, PatternFill

from farkascert import __version__
from farkascert.errors import ProblemFileError
from farkascert.farkas import FarkasCertificate
from farkascert.optimal import KktCertificate

logger = logging.getLogger(__name__)

TOOL = 'farkascert'

HEADER_FILL = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
HEADER_FONT = Font(bold=True, color="FFFFFF")
PASS_FILL = PatternFill(start_color="C6EFCE", end_color="C6EFCE", fill_type="solid")
PASS_FONT = Font(color="006100")
FAIL_FILL = PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid")
FAIL_FONT = Font(color="9C0006")
NOTE_FILL = PatternFill(start_color="FFEB9C", end_color="FFEB9C", fill_type="solid")
NOTE_FONT = Font(color="9C5700")


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

def rational(x):
    if x is None:
        return None
    if x == math.inf:
        return 'inf'
    if x == -math.inf:
        return '-inf'
    return str(Fraction(x))


def vector(v):
    return None if v is None else [rational(x) for x in v]


def parse_value(text, path):
    if text == 'inf':
        return math.inf
    if text == '-inf':
        return -math.inf
    try:
        return Fraction(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ProblemFileError(path, f"expected a rational string, got {text!r}") from None


def parse_vec(values, path):
    if not isinstance(values, list):
        raise ProblemFileError(path, "expected a list of rational strings")
    return tuple(parse_value(v, f"{path}[{k}]") for k, v in enumerate(values))


# ---------------------------------------------------------------------------
# Result objects
# ---------------------------------------------------------------------------

def certificate_dict(cert):
    return {
        'J': list(cert.J),
        'lambdas': {name: rational(lam) for name, lam in cert.lambdas.items()},
        'u_star': vector(cert.u_star),
        'u_star_value': rational(cert.u_star_value),
        'v_star': vector(cert.v_star),
        'v_star_value': rational(cert.v_star_value),
        'u_j': {name: vector(u) for name, u in cert.u_j.items()},
        'u_j_values': {name: rational(v) for name, v in cert.u_j_values.items()},
        'x_star': vector(cert.x_star),
        's': rational(cert.s),
    }


def certificate_from_dict(data, path='certificate'):
    """Rebuild a FarkasCertificate; the constructor re-verifies it exactly"""
    if not isinstance(data, dict):
        raise ProblemFileError(path, "expected an object")
    try:
        return FarkasCertificate(
            x_star=parse_vec(data['x_star'], f"{path}.x_star"),
            s=parse_value(data['s'], f"{path}.s"),
            u_star=parse_vec(data['u_star'], f"{path}.u_star"),
            u_star_value=parse_value(data['u_star_value'], f"{path}.u_star_value"),
            v_star=parse_vec(data['v_star'], f"{path}.v_star"),
            v_star_value=parse_value(data['v_star_value'], f"{path}.v_star_value"),
            lambdas={k: parse_value(v, f"{path}.lambdas.{k}") for k, v in data['lambdas'].items()},
            u_j={k: parse_vec(v, f"{path}.u_j.{k}") for k, v in data['u_j'].items()},
            u_j_values={k: parse_value(v, f"{path}.u_j_values.{k}") for k, v in data['u_j_values'].items()},
        )
    except KeyError as e:
        raise ProblemFileError(f"{path}.{e.args[0]}", "missing field") from None


def verdict_dict(verdict):
    out = {
        'status': verdict.status,
        'x_star': vector(verdict.x_star),
        's': rational(verdict.s),
    }
    if verdict.certificate is not None:
        out['certificate'] = certificate_dict(verdict.certificate)
    if verdict.witness is not None:
        out['witness'] = vector(verdict.witness)
    if verdict.diagnosis:
        out['diagnosis'] = dict(verdict.diagnosis)
    return out


def hidden_dict(hidden):
    return {'status': hidden.status, 'witness': vector(hidden.witness)}


def fm_dict(fm):
    return {'status': fm.status, 'offending_ray': vector(fm.offending_ray), 'reason': fm.reason}


def closure_decomposition_dict(dec):
    return {
        'system_part': vector(dec.system_part),
        'cone_parts': {name: {'w': vector(w), 'lambda': rational(lam)} for name, (w, lam) in dec.cone_parts.items()},
    }


def existence_dict(existence):
    return {
        'consistent': existence.consistent,
        'dual_point_outside_closure': existence.dual_point_outside,
        'cones_differ': existence.cones_differ,
        'closure_is_barrier_sum_cylinder': existence.barrier_sum_cylinder,
        'closure_is_union_hull_cylinder': existence.union_hull_cylinder,
        'closure_is_sum_hull_cylinder': existence.sum_hull_cylinder,
    }


def consistency_dict(result):
    out = {'status': result.status, 'witness': vector(result.witness)}
    if result.certificate is not None:
        out['dual_certificate'] = closure_decomposition_dict(result.certificate)
    if result.existence is not None:
        out['existence'] = existence_dict(result.existence)
    return out


def recession_dict(conditions):
    return {
        'vertical_line_escapes': conditions.line_escapes,
        'outside_dual_sum': conditions.outside_dual_sum,
        'witness': vector(conditions.witness),
        'solution_set_witness': vector(conditions.solution_witness),
        'equivalent': conditions.agree,
    }


def closedness_dict(closedness):
    return {
        'closed': closedness.closed,
        'route': closedness.route,
        'fm': fm_dict(closedness.fm),
        'interior_point': vector(closedness.interior_point),
    }


def kkt_dict(cert):
    return {
        'J': list(cert.J),
        'lambdas': {name: rational(lam) for name, lam in cert.lambdas.items()},
        'u_star': vector(cert.u_star),
        'v_star': vector(cert.v_star),
        'u_j': {name: vector(u) for name, u in cert.u_j.items()},
        'hypothesis_verified': cert.hypothesis_verified,
        'closedness_route': cert.closedness_route,
    }


def kkt_from_dict(data, path='certificate'):
    if not isinstance(data, dict):
        raise ProblemFileError(path, "expected an object")
    try:
        return KktCertificate(
            lambdas={k: parse_value(v, f"{path}.lambdas.{k}") for k, v in data['lambdas'].items()},
            u_star=parse_vec(data['u_star'], f"{path}.u_star"),
            v_star=parse_vec(data['v_star'], f"{path}.v_star"),
            u_j={k: parse_vec(v, f"{path}.u_j.{k}") for k, v in data['u_j'].items()},
            hypothesis_verified=bool(data.get('hypothesis_verified', False)),
            closedness_route=data.get('closedness_route'),
        )
    except KeyError as e:
        raise ProblemFileError(f"{path}.{e.args[0]}", "missing field") from None


# ---------------------------------------------------------------------------
# Envelopes and renderings
# ---------------------------------------------------------------------------

def envelope(command, result, digest='', seed=None):
    report = {
        'tool': TOOL,
        'version': __version__,
        'command': command,
        'input_sha256': digest,
        'result': result,
    }
    if seed is not None:
        report['seed'] = seed
    return report


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2) + '\n'


def load_report(path):
    try:
        with open(path, encoding='utf-8') as fh:
            return json.load(fh)
    except OSError as e:
        raise ProblemFileError(str(path), f"cannot read report: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ProblemFileError(str(path), f"invalid JSON: {e}") from e


def _flatten(value, prefix=''):
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(value[key], f"{prefix}.{key}" if prefix else key)
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        for k, item in enumerate(value):
            yield from _flatten(item, f"{prefix}[{k}]")
    elif isinstance(value, list):
        yield prefix, '(' + ', '.join('-' if v is None else str(v) for v in value) + ')'
    else:
        yield prefix, '-' if value is None else str(value)


def render_text(report):
    lines = [f"{report['tool']} {report['version']}  {report['command']}"]
    if report.get('input_sha256'):
        lines.append(f"input sha256: {report['input_sha256']}")
    narrative = report['result'].get('narrative') if isinstance(report['result'], dict) else None
    if narrative:
        lines.append('')
        lines.extend(narrative)
        lines.append('')
    rest = {k: v for k, v in report['result'].items() if k not in ('narrative', 'checks')}
    for key, value in _flatten(rest):
        lines.append(f"  {key}: {value}")
    for check in report['result'].get('checks', []):
        mark = 'PASS' if check['passed'] else 'FAIL'
        lines.append(f"  {mark}  {check['name']}  {check.get('detail', '')}".rstrip())
    return '\n'.join(lines) + '\n'


def _status_style(value):
    if value is True or value in ('pass', 'FM', 'Consistent', 'Holds', 'CertifiedConsequence'):
        return PASS_FILL, PASS_FONT
    if value is False or value in ('fail', 'NotFM', 'Inconsistent', 'Fails', 'NotConsequence'):
        return FAIL_FILL, FAIL_FONT
    return NOTE_FILL, NOTE_FONT


def write_xlsx(report, path):
    """One row per check (selftest) or per result field, status cells colored"""
    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = report['command'][:31]

    headers = ["Item", "Value", "Detail"]
    for col_num, header in enumerate(headers, 1):
        cell = ws.cell(row=1, column=col_num)
        cell.value = header
        cell.fill = HEADER_FILL
        cell.font = HEADER_FONT
        cell.alignment = Alignment(horizontal="center", vertical="center")

    result = report['result']
    if isinstance(result, dict) and isinstance(result.get('checks'), list):
        rows = [(c['name'], 'pass' if c['passed'] else 'fail', c.get('detail', '')) for c in result['checks']]
    else:
        rows = [(key, value, '') for key, value in _flatten(result)]

    for row_num, (item, value, detail) in enumerate(rows, 2):
        ws.cell(row=row_num, column=1, value=item)
        status_cell = ws.cell(row=row_num, column=2, value=value)
        ws.cell(row=row_num, column=3, value=detail)
        if value in ('pass', 'fail', 'True', 'False', 'FM', 'NotFM', 'Consistent', 'Inconsistent',
                     'Holds', 'Fails', 'CertifiedConsequence', 'NotConsequence'):
            fill, font = _status_style({'True': True, 'False': False}.get(value, value))
            status_cell.fill = fill
            status_cell.font = font

    ws.column_dimensions['A'].width = 48
    ws.column_dimensions['B'].width = 28
    ws.column_dimensions['C'].width = 60
    wb.save(path)
    logger.info(f"Workbook written to {path}")

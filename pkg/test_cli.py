import json
from pathlib import Path

import openpyxl
import pytest

from farkascert import cli, farkas, selftest
from farkascert.errors import SolverError

PROBLEMS = Path(__file__).parent / 'problems'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_check_example1_is_vacuous(capsys):
    code, rep = run_json(capsys, 'check', str(PROBLEMS / 'example1.json'))
    assert code == cli.EXIT_OK
    assert rep['tool'] == 'farkascert'
    assert rep['command'] == 'check'
    assert len(rep['input_sha256']) == 64
    assert rep['result']['status'] == 'VacuousHiddenAssumptionFails'


def test_fm_example1(capsys):
    code, rep = run_json(capsys, 'fm', str(PROBLEMS / 'example1.json'))
    assert code == 0
    assert rep['result']['status'] == 'FM'


def test_fm_not_fm(capsys):
    _, rep = run_json(capsys, 'fm', str(PROBLEMS / 'not_fm.json'))
    assert rep['result']['status'] == 'NotFM'
    assert rep['result']['offending_ray'][0] == '0' and rep['result']['offending_ray'][2] == '0'


def test_consistency_infeasible_pair(capsys):
    code, rep = run_json(capsys, 'consistency', str(PROBLEMS / 'infeasible_pair.json'))
    assert code == 0
    assert rep['result']['status'] == 'Inconsistent'
    assert rep['result']['witness'] is None
    assert set(rep['result']['dual_certificate']['cone_parts']) <= {'f1', 'f2'}
    assert rep['result']['existence']['closure_is_barrier_sum_cylinder'] is True


def test_hidden_example1(capsys):
    _, rep = run_json(capsys, 'hidden', str(PROBLEMS / 'example1.json'))
    assert rep['result'] == {'status': 'Fails', 'witness': None}


def test_certify_and_verify_round_trip(capsys, tmp_path):
    code, out = run(capsys, 'certify', str(PROBLEMS / 'halfline.json'))
    assert code == 0
    rep = json.loads(out)
    cert = rep['result']['certificate']
    assert cert['lambdas'] == {'f1': '1'}
    assert cert['u_star'] == ['-1']
    assert rep['result']['lagrangian_bound'] == '-1'
    saved = tmp_path / 'cert.json'
    saved.write_text(out, encoding='utf-8')

    _, verified = run_json(capsys, 'certify', str(PROBLEMS / 'halfline.json'), '--verify', str(saved))
    assert verified['result']['verified'] is True

    rep['result']['certificate']['lambdas']['f1'] = '2'
    saved.write_text(json.dumps(rep), encoding='utf-8')
    code, tampered = run_json(capsys, 'certify', str(PROBLEMS / 'halfline.json'), '--verify', str(saved))
    assert code == 0
    assert tampered['result']['verified'] is False


def test_reports_are_byte_identical(capsys):
    first = run(capsys, 'diagnose', str(PROBLEMS / 'example1.json'))
    second = run(capsys, 'diagnose', str(PROBLEMS / 'example1.json'))
    assert first == second


def test_diagnose_narrative(capsys):
    code, out = run(capsys, 'diagnose', str(PROBLEMS / 'example1.json'), '--text')
    assert code == 0
    assert 'Reverse Farkas equivalence not applicable: A ∩ dom f = ∅' in out
    assert 'VacuousHiddenAssumptionFails' in out


def test_optimal_and_kkt(capsys):
    _, rep = run_json(capsys, 'optimal', str(PROBLEMS / 'kkt_abs.json'))
    assert rep['result']['optimal'] is True
    assert rep['result']['direct']['value'] == '1'
    _, rep = run_json(capsys, 'kkt', str(PROBLEMS / 'kkt_abs.json'))
    assert rep['result']['certificate']['lambdas'] == {'f1': '1'}
    assert rep['result']['verified'] is True


def test_kkt_without_x_bar_is_input_error(capsys):
    code, _ = run(capsys, 'kkt', str(PROBLEMS / 'example1.json'))
    assert code == cli.EXIT_INPUT


def test_float_in_problem_file(capsys, tmp_path, caplog):
    bad = tmp_path / 'bad.json'
    bad.write_text(json.dumps({
        'dimension': 1,
        'constraints': [{'form': 'affine', 'a': [0.5], 'b': 0}],
    }), encoding='utf-8')
    code, _ = run(capsys, 'check', str(bad))
    assert code == cli.EXIT_INPUT
    assert 'constraints[0].a[0]' in caplog.text


def test_missing_problem_file(capsys, tmp_path):
    code, _ = run(capsys, 'fm', str(tmp_path / 'absent.json'))
    assert code == cli.EXIT_INPUT


def test_generator_limit_exit_code(capsys):
    code, _ = run(capsys, 'fm', str(PROBLEMS / 'example1.json'), '--max-generators', '1')
    assert code == cli.EXIT_LIMIT


def test_xlsx_export(capsys, tmp_path):
    target = tmp_path / 'fm.xlsx'
    run(capsys, 'fm', str(PROBLEMS / 'example1.json'), '--xlsx', str(target))
    ws = openpyxl.load_workbook(target).active
    assert [c.value for c in ws[1]] == ['Item', 'Value', 'Detail']
    values = {ws.cell(row=r, column=1).value: ws.cell(row=r, column=2).value for r in range(2, ws.max_row + 1)}
    assert values['status'] == 'FM'


def test_corrupted_golden_names_the_check(tmp_path):
    golden = json.loads(selftest.GOLDEN_PATH.read_text(encoding='utf-8'))
    golden['closure_of_K']['inequalities'][0]['b'] = '1'
    path = tmp_path / 'golden.json'
    path.write_text(json.dumps(golden), encoding='utf-8')
    suite = selftest.SelfTest(golden_path=path)
    suite.golden_checks()
    assert suite.first_failure.name == 'golden.closure_of_K'


def test_golden_checks_pass():
    suite = selftest.SelfTest()
    suite.golden_checks()
    assert suite.passed, suite.first_failure


@pytest.mark.slow
def test_selftest_is_deterministic(capsys):
    first = run(capsys, 'selftest', '--seed', '42')
    second = run(capsys, 'selftest', '--seed', '42')
    assert first[0] == cli.EXIT_OK
    assert first == second


@pytest.mark.slow
def test_selftest_with_corrupted_golden(capsys, tmp_path):
    path = tmp_path / 'golden.json'
    path.write_text('{"fm": "NotFM"}', encoding='utf-8')
    code = cli.main(['selftest', '--golden', str(path)])
    err = capsys.readouterr().err
    assert code == cli.EXIT_SELFTEST
    assert 'golden.' in err


def test_kkt_report_round_trip(capsys, tmp_path):
    code, out = run(capsys, 'kkt', str(PROBLEMS / 'kkt_abs.json'))
    assert code == 0
    saved = tmp_path / 'kkt.json'
    saved.write_text(out, encoding='utf-8')

    _, verified = run_json(capsys, 'kkt', str(PROBLEMS / 'kkt_abs.json'), '--verify', str(saved))
    assert verified['result']['verified'] is True
    assert verified['result']['certificate']['lambdas'] == {'f1': '1'}

    rep = json.loads(out)
    rep['result']['certificate']['lambdas']['f1'] = '2'
    saved.write_text(json.dumps(rep), encoding='utf-8')
    code, tampered = run_json(capsys, 'kkt', str(PROBLEMS / 'kkt_abs.json'), '--verify', str(saved))
    assert code == 0
    assert tampered['result']['verified'] is False


def test_kkt_verify_needs_a_certificate(capsys, tmp_path):
    saved = tmp_path / 'empty.json'
    saved.write_text(json.dumps({'result': {'certificate': None}}), encoding='utf-8')
    code, _ = run(capsys, 'kkt', str(PROBLEMS / 'kkt_abs.json'), '--verify', str(saved))
    assert code == cli.EXIT_INPUT


def test_internal_errors_are_reported_as_such(capsys, caplog, monkeypatch):
    def broken(sigma, diagnostics=False):
        raise SolverError("primal and dual consistency routes disagree")

    monkeypatch.setattr(farkas, 'is_consistent', broken)
    code, _ = run(capsys, 'consistency', str(PROBLEMS / 'infeasible_pair.json'))
    assert code == cli.EXIT_INPUT
    assert 'Internal error' in caplog.text
    assert 'Input error' not in caplog.text

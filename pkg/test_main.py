"""
End-to-end tests of the command-line front-end
"""

import json

import pytest

from main import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, glue_negative_values, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_glue_negative_values():
    assert glue_negative_values(['an', '2', '--coeffs', '-3,0']) == ['an', '2', '--coeffs=-3,0']
    assert glue_negative_values(['--first', '-3,0', '--second', '-12,0']) == ['--first=-3,0', '--second=-12,0']
    assert glue_negative_values(['--order', '-1']) == ['--order', '-1']


def test_spectrum_report(capsys):
    code, report = run(capsys, 'spectrum', '--an', '3,3,3,3')
    assert code == EXIT_OK
    assert report['status'] == 'ok'
    assert report['an']['betti'] == [1, 19, 1]
    assert report['an']['d'] == '2'
    assert report['an']['integral'] is True


def test_spectrum_requires_integral(capsys):
    code, report = run(capsys, 'spectrum', '--an', '2,2', '--require-integral')
    assert code == EXIT_VIOLATION
    assert report['status'] == 'violation'
    assert report['checks']['integrality']['violations'][0]['identity'] == 'integral_d'


def test_spectrum_without_input_is_an_error(capsys):
    code, report = run(capsys, 'spectrum')
    assert code == EXIT_ERROR
    assert report['error']['type'] == 'FrobeniusError'


def test_an_special_point(capsys):
    code, report = run(capsys, 'an', '2', '--coeffs', '-3,0', '--special', '--verify-closed-form')
    assert code == EXIT_OK
    v01 = report['special']['v'][0][1]
    assert v01 == pytest.approx([1 / 6, 0], abs=1e-12)
    assert report['checks']['closed_form']['passed'] is True


def test_an_special_point_needs_tameness(capsys):
    code, report = run(capsys, 'an', '2', '--coeffs', '0,0', '--special')
    assert code == EXIT_ERROR
    assert report['error']['type'] == 'NonTameError'


def test_sum_verify_and_tensor_files(capsys, tmp_path):
    first, second, total = tmp_path / 'a.json', tmp_path / 'b.json', tmp_path / 'sum.json'
    assert run(capsys, 'an', '2', '--coeffs', '-3,0', '--germ-out', str(first))[0] == EXIT_OK
    assert run(capsys, 'an', '2', '--coeffs', '-12,0', '--germ-out', str(second))[0] == EXIT_OK

    code, report = run(capsys, 'sum-verify', '--first', '-3,0', '--second', '-12,0', '--germ-out', str(total))
    assert code == EXIT_OK
    assert report['checks']['direct_sum']['passed'] is True

    code, report = run(capsys, 'tensor', str(first), str(second), '--compare', str(total))
    assert code == EXIT_OK
    assert report['germ']['size'] == 4


def test_dgbv_conditions_failure(capsys):
    code, report = run(capsys, 'dgbv', 'conditions', 'eps-xi-deltazero')
    assert code == EXIT_VIOLATION
    conditions = report['checks']['conditions']
    assert conditions['A'] is True
    assert conditions['B'] is False


def test_dgbv_potential(capsys):
    code, report = run(capsys, 'dgbv', 'potential', 'square-deformation', '--order', '5')
    assert code == EXIT_OK
    assert report['algebra'] == 'square-deformation'
    assert report['metric'] == [['0', '1'], ['1', '0']]


def test_dgbv_missing_algebra(capsys):
    code, report = run(capsys, 'dgbv', 'check', 'no-such-algebra')
    assert code == EXIT_ERROR
    assert report['error']['type'] == 'AlgebraSpecError'


def test_p2_degree_one(capsys):
    code, report = run(capsys, 'p2', '--degree', '1')
    assert code == EXIT_OK
    assert report['numbers'] == ['1']


def test_reports_are_deterministic(capsys):
    argv = ('dgbv', 'identities', 'exterior-square', '--samples', '4', '--seed', '3')
    assert run(capsys, *argv) == run(capsys, *argv)


def test_output_file_matches_stdout(capsys, tmp_path):
    target = tmp_path / 'reports' / 'betti.json'
    code, report = run(capsys, 'spectrum', '--an', '2,2,2', '--output', str(target))
    assert code == EXIT_OK
    assert json.loads(target.read_text(encoding='utf-8')) == report


def test_suite_subset(capsys):
    code, report = run(capsys, 'suite', '--only', 'betti', '--only', 'direct_sum')
    assert code == EXIT_OK
    assert sorted(report['checks']) == ['betti', 'direct_sum']


def test_catalog_suite(capsys):
    code, report = run(capsys, 'suite', '--only', 'catalog', '--samples', '100', '--seed', '0')
    assert code == EXIT_OK
    catalog = report['checks']['catalog']
    assert catalog['passed'] is True
    assert catalog['violations'] == []


def test_unknown_suite(capsys):
    code, report = run(capsys, 'suite', '--only', 'nope')
    assert code == EXIT_ERROR

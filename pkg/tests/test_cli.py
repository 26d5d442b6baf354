import json

import pandas as pd
import pytest

from hnpcount.cli import main, parse_extension_input
from hnpcount.groups import FinAbGroup


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_count(capsys):
    assert run(capsys, 'count', '--group', '2', '--bound', '10', '--threads', '1') == (0, '6\n', '')
    _, searched, _ = run(capsys, 'count', '--group', '2,2', '--bound', '10**3', '--threads', '1')
    _, inverted, _ = run(capsys, 'count', '--group', '2,2', '--bound', '10**3', '--method', 'delsarte',
                         '--threads', '1')
    _, by_modulus, _ = run(capsys, 'count', '--group', '2,2', '--bound', '1e3', '--method', 'modulus')
    assert searched == inverted == by_modulus


def test_invalid_group_exits_with_two(capsys):
    status, out, err = run(capsys, 'count', '--group', '2,4', '--bound', '100')
    assert status == 2
    assert err.startswith('hnpcount: error:')


def test_invalid_bound_is_rejected_by_the_parser():
    with pytest.raises(SystemExit) as raised:
        main(['count', '--group', '2', '--bound', '0'])
    assert raised.value.code == 2


def test_invalid_thread_count(capsys):
    status, _, err = run(capsys, 'count', '--group', '2', '--bound', '10', '--threads', '0')
    assert status == 2 and 'thread' in err


def test_enumerate_jsonl(capsys):
    status, out, _ = run(capsys, 'enumerate', '--group', '2', '--bound', '10', '--threads', '1')
    assert status == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [r['disc'] for r in records] == ['3', '4', '5', '7', '8', '8']
    assert records[0] == {'components': [{'gamma': [1], 'p': 3}], 'disc': '3', 'surjective': True}


def test_enumerate_csv(tmp_path, capsys):
    path = tmp_path / 'klein.csv'
    status, _, _ = run(capsys, 'enumerate', '--group', '2,2', '--bound', '144', '--format', 'csv',
                       '--output', str(path), '--threads', '1')
    assert status == 0
    table = pd.read_csv(path, dtype=str)
    assert list(table.columns) == ['disc', 'conductor', 'primes']
    assert set(table['disc']) == {'144'} and set(table['conductor']) == {'12'} and set(table['primes']) == {'2;3'}


def test_conditions_file(tmp_path, capsys):
    path = tmp_path / 'conditions.json'
    path.write_text(json.dumps([{'default': True, 'rule': 'any'}, {'p': 3, 'rule': 'unramified'}]))
    assert run(capsys, 'count', '--group', '2,2', '--bound', '144', '--conditions', str(path),
               '--threads', '1')[:2] == (0, '0\n')
    status, _, err = run(capsys, 'count', '--group', '2,2', '--bound', '144', '--conditions', str(path),
                         '--method', 'delsarte')
    assert status == 2


def test_survey(tmp_path, capsys):
    path = tmp_path / 'survey.csv'
    status, _, _ = run(capsys, 'survey', '--group', '2,2', '--bounds', '144,10**3', '--predicates', 'totally_real',
                       '--output', str(path), '--threads', '1')
    assert status == 0
    table = pd.read_csv(path)
    assert list(table['B']) == [144, 1000]
    assert 'N_totally_real' in table.columns


def test_biquadratic(capsys):
    status, out, _ = run(capsys, 'test', '--biquadratic', '13,17')
    assert status == 0
    assert json.loads(out) == {'hnp': False, 'sha_order': '2', 'a_order': '1', 'wa': True}


def test_components_file(tmp_path, capsys):
    path = tmp_path / 'ext.json'
    path.write_text(json.dumps({'group': '2,2', 'components': [{'p': 13, 'gamma': [1, 0]},
                                                               {'p': 17, 'gamma': [0, 1]}]}))
    status, out, _ = run(capsys, 'test', '--group', '2,2', '--components', str(path), '--verbose-report')
    assert status == 0
    record = json.loads(out)
    assert record['hnp'] is False and record['disc'] == '48841'
    assert record['decomposition_cyclic'] is True
    assert len(record['certificate']) == 1


def test_non_surjective_components(tmp_path, capsys):
    path = tmp_path / 'ext.json'
    path.write_text(json.dumps([{'p': 5, 'gamma': [1, 0]}]))
    status, _, err = run(capsys, 'test', '--group', '2,2', '--components', str(path))
    assert status == 2 and 'not surjective' in err
    path.write_text(json.dumps({'group': '4', 'components': []}))
    assert run(capsys, 'test', '--group', '2,2', '--components', str(path))[0] == 2
    assert run(capsys, 'test', '--group', '2,2')[0] == 2


def test_fit(tmp_path, capsys):
    path = tmp_path / 'counts.csv'
    pd.DataFrame({'B': [100, 1000, 10000], 'N': [10, 100, 1000]}).to_csv(path, index=False)
    status, out, _ = run(capsys, 'fit', '--group', '2', '--counts', str(path))
    assert status == 0
    result = json.loads(out)
    assert result['slope'] == pytest.approx(1.0)
    assert result['alpha'] == 1 and result['nu'] == 1


def test_verify(capsys):
    status, out, _ = run(capsys, 'verify', '--suite', 'analytic', '--threads', '1')
    assert status == 0
    assert out.startswith('Preset analytic: passed')


def test_preset(tmp_path, capsys):
    status, out, _ = run(capsys, 'preset', 'eq1.1-crosscheck', '--output-dir', str(tmp_path), '--max-bound', '200',
                         '--threads', '1')
    assert status == 0
    assert (tmp_path / 'eq1.1-crosscheck-summary.txt').exists()
    assert (tmp_path / 'eq1.1-crosscheck-disagreements.csv').exists()


def test_parse_extension_input(tmp_path):
    klein = FinAbGroup((2, 2))
    components = [{'p': 13, 'gamma': [1, 0]}, {'p': 17, 'gamma': [0, 1]}]
    listed = tmp_path / 'listed.json'
    listed.write_text(json.dumps(components))
    wrapped = tmp_path / 'wrapped.json'
    wrapped.write_text(json.dumps({'group': '2,2', 'components': components}))
    assert parse_extension_input(str(listed), klein) == parse_extension_input(str(wrapped), klein)
    assert parse_extension_input(str(listed), klein).discriminant == 48841
    with pytest.raises(ValueError, match='group'):
        parse_extension_input(str(wrapped), FinAbGroup((4, 2)))
    broken = tmp_path / 'broken.json'
    broken.write_text('[{"p": 13')
    with pytest.raises(ValueError):
        parse_extension_input(str(broken), klein)

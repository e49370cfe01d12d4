import json

import pytest

from src.conf.config import settings


def manifest_line(err):
    return json.loads([line for line in err.splitlines() if line.startswith('{')][-1])


def test_group_report(cli):
    code, out, _ = cli('group', '4,4')
    assert code == 0
    report = json.loads(out)
    assert report['verdict'] == 'OpenInterval'
    assert (report['ell'], report['quotient'], report['torsion']) == (2, '2,2', '2,2')
    assert report['manifest']['command'] == 'group'
    code, out, _ = cli('group', '6,4')
    assert json.loads(out)['group'] == '2,12'


def test_hnp_decisions(cli, tmp_path):
    lines = tmp_path / 'lines.json'
    lines.write_text(json.dumps({'group': '2,2', 'decomposition_groups': [['1,0'], ['0,1'], ['1,1']]}))
    assert cli('hnp', '2,2', lines)[:2] == (1, 'FAILS\n')
    full = tmp_path / 'full.json'
    full.write_text(json.dumps({'group': '2,2', 'decomposition_groups': [[[1, 0], [0, 1]]]}))
    assert cli('hnp', '2,2', full)[:2] == (0, 'HOLDS\n')


def test_hnp_bad_input(cli, tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"group": "2,2", "decomposition_groups": 7}')
    code, _, err = cli('hnp', '2,2', broken)
    assert code == 2
    assert 'error:' in err
    other = tmp_path / 'other.json'
    other.write_text(json.dumps({'group': '4', 'decomposition_groups': []}))
    assert cli('hnp', '2,2', other)[0] == 2
    assert cli('hnp', '2,2', tmp_path / 'missing.json')[0] == 2
    element = tmp_path / 'element.json'
    element.write_text(json.dumps({'group': '2,2', 'decomposition_groups': [['1,0,1']]}))
    assert cli('hnp', '2,2', element)[0] == 2


def test_verify(cli):
    code, out, _ = cli('verify', '--bound', 16)
    assert code == 0
    report = json.loads(out)
    assert report['passed'] and not report['partial']
    assert report['checked'] == 24


def test_verify_resource_cap(cli, monkeypatch):
    monkeypatch.setattr(settings, 'verify_max_bound', 8)
    code, out, _ = cli('verify', '--bound', 10)
    assert code == 3
    report = json.loads(out)
    assert report['partial'] and report['bound'] == 10
    assert 'partial' in report['summary']


def test_enumerate_jsonl(cli):
    code, out, err = cli('enumerate', '--group', '2', '--max-disc', '10')
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [record['disc'] for record in records] == [3, 4, 5, 7, 8, 8]
    assert records[0]['ramified'][0]['p'] == 3
    manifest = manifest_line(err)
    assert manifest['bounds']['max_disc'] == 10
    assert manifest['argv'] == ['enumerate', '--group', '2', '--max-disc', '10']


def test_enumerate_classical_failure(cli):
    code, out, _ = cli('enumerate', '--group', '2,2', '--max-disc', '48841')
    assert code == 0
    last = json.loads(out.splitlines()[-1])
    failures = [json.loads(line) for line in out.splitlines() if '"hnp":false' in line]
    assert any(record['disc'] == 48841 and record['conductor'] == 221 for record in failures)
    assert last['disc'] <= 48841


def test_enumerate_budget(cli):
    code, out, err = cli('enumerate', '--group', '2', '--max-disc', '1e3', '--budget', 20)
    assert code == 3
    frontier = int(manifest_line(err)['bounds']['complete_below'])
    assert all(json.loads(line)['disc'] < frontier for line in out.splitlines())


def test_enumerate_to_file(cli, tmp_path):
    target = tmp_path / 'quadratic.jsonl'
    code, out, _ = cli('enumerate', '--group', '2', '--max-disc', '10', '--out', target)
    assert code == 0 and out == ''
    assert len(target.read_text().splitlines()) == 6
    manifest = json.loads((tmp_path / 'quadratic.jsonl.manifest.json').read_text())
    assert manifest['command'] == 'enumerate'
    assert manifest['deterministic'] is True


def test_archive_store_and_export(cli, archive):
    code, out, _ = cli('enumerate', '--group', '2', '--max-disc', '100', '--store')
    assert code == 0
    code, listed, _ = cli('runs', '--limit', 1)
    summary = json.loads(listed.splitlines()[0])
    assert (summary['command'], summary['group'], summary['max_disc']) == ('enumerate', '2', '100')
    assert summary['field_count'] == len(out.splitlines())
    code, exported, _ = cli('export', summary['id'])
    assert code == 0
    assert exported == out
    assert cli('export', 10 ** 6)[0] == 2


def test_counts_csv(cli):
    code, out, _ = cli('counts', '--group', '2', '--max-disc', '10', '--grid', '3,4,5,8,10')
    assert code == 0
    assert out.splitlines() == ['X,N(X)', '3,1', '4,2', '5,3', '8,6', '10,6']


def test_wright_report(cli):
    code, out, _ = cli('wright', '--group', '2', '--max-disc', '10^3', '--grid', '10,100,1000')
    assert code == 0
    report = json.loads(out)
    assert (report['power'], report['logpower']) == ('1', '0')
    assert [point['X'] for point in report['counts']] == [10, 100, 1000]


def test_density_csv(cli):
    code, out, _ = cli('density', '--group', '2', '--max-disc', '100', '--grid', '10,100')
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == 'X,total,hits,ratio'
    assert rows[1] == '10,6,6,1.000000'
    code, out, _ = cli('density', '--group', '2', '--max-disc', '10', '--grid', '10',
                       '--predicate', 'local', '--condition', '3=unramified:*')
    assert out.splitlines()[1] == '10,6,5,0.833333'
    assert cli('density', '--group', '2', '--max-disc', '10', '--predicate', 'local')[0] == 2
    assert cli('density', '--group', '2', '--max-disc', '10', '--predicate', 'local',
               '--condition', '3:split')[0] == 2


def test_wood_check(cli):
    code, out, _ = cli('wood-check', '--group', '2', '--place', 3, '--spec', 'ramified:1:*', '--max-radical', 10)
    assert code == 0
    report = json.loads(out)
    assert (report['model'], report['empirical'], report['hits'], report['total']) == ('1/4', '1/3', 4, 12)
    assert report['within_band']
    assert cli('wood-check', '--group', '2', '--place', 3, '--place', 5, '--spec', 'split',
               '--max-radical', 10)[0] == 2


def test_dichotomy_and_trichotomy(cli):
    code, out, _ = cli('dichotomy', '--group', '2,2', '--max-disc', 2000, '--grid', '500,2000')
    assert code == 0
    report = json.loads(out)
    assert report['predicted'] == 1 and report['places'] == [2]
    assert report['split_in_family']
    assert cli('dichotomy', '--group', '2,2', '--max-disc', 2000, '--split', '--force')[0] == 2
    assert cli('dichotomy', '--group', '2,2', '--max-disc', 2000, '--base', 5)[0] == 2
    code, out, _ = cli('trichotomy', '--group', '3', '--max-disc', 1000)
    report = json.loads(out)
    assert (report['verdict'], report['consistency']) == ('One', 'consistent')


@pytest.mark.slow
def test_dichotomy_split_open_interval(cli):
    code, out, _ = cli('dichotomy', '--group', '4,4', '--max-disc', '10^26', '--split', '--jobs', 4)
    assert code == 0
    report = json.loads(out)
    assert report['split_in_family']
    assert report['predicted'] == 0
    assert 'totally split' in report['summary']


@pytest.mark.parametrize('argv', [
    ('group', '0,4'),
    ('enumerate', '--group', '2', '--max-disc', 'ten'),
    ('enumerate', '--group', '2', '--max-disc', '0'),
    ('enumerate', '--group', '2'),
    ('counts', '--group', '2', '--max-disc', '10', '--grid', '10,5'),
])
def test_bad_input_exits_with_two(cli, argv):
    assert cli(*argv)[0] == 2


def test_version(cli):
    code, out, _ = cli('--version')
    assert code == 0
    assert out.startswith('hnp-density')

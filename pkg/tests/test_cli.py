"""
Tests for the gricci command-line front end
"""

import json

import pandas as pd
import pytest

from apps.gricci import CHECK_IDS, main
from core.construct import catalog
from core.instance_file import export_instance


def _json_lines(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def instance_file(tmp_path):
    """Write a catalog instance to disk, optionally edited"""
    def make(name, edit=None, filename='instance.json'):
        data = json.loads(export_instance(catalog(name)))
        if edit:
            edit(data)
        path = tmp_path / filename
        path.write_text(json.dumps(data, indent=2))
        return str(path)
    return make


class TestCheck:
    def test_catalog_instance_passes(self, capsys):
        assert main(['check', '--instance', 'so3_bidiagonal', '--json']) == 0
        lines = _json_lines(capsys.readouterr().out)
        assert [line['check'] for line in lines] == ['axioms', 'metric']
        assert all(line['status'] == 'pass' for line in lines)
        assert all(line['elapsed_ms'] is None for line in lines)

    def test_perturbed_structure_constant_fails(self, capsys, instance_file):
        def perturb(data):
            data['structure'][0][1][2] = '2'
        path = instance_file('so3_product', perturb)
        assert main(['check', '--input', path, '--json']) == 1
        lines = _json_lines(capsys.readouterr().out)
        assert lines[0]['status'] == 'fail'
        assert lines[0]['witness'].startswith('axiom1_jacobi')

    def test_truncated_file(self, tmp_path, capsys):
        path = tmp_path / 'broken.json'
        path.write_text(export_instance(catalog('abelian_point'))[:200])
        assert main(['check', '--input', str(path)]) == 2
        assert 'Malformed JSON' in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(['check', '--input', str(tmp_path / 'nope.json')]) == 2

    def test_human_output(self, capsys):
        assert main(['check', '--instance', 'abelian_point']) == 0
        out = capsys.readouterr().out
        assert 'abelian_point' in out and 'pass' in out

    def test_timing(self, capsys):
        assert main(['--timing', 'check', '--instance', 'abelian_point', '--json']) == 0
        lines = _json_lines(capsys.readouterr().out)
        assert all(line['elapsed_ms'] >= 0 for line in lines)


class TestVerify:
    def test_selected_checks_in_fixed_order(self, capsys):
        argv = ['verify', '--instance', 'so3_bidiagonal', '--check', 'total_ricci',
                '--check', 'thm1', '--json']
        assert main(argv) == 0
        lines = _json_lines(capsys.readouterr().out)
        assert [line['check'] for line in lines] == ['thm1', 'total_ricci']

    def test_output_is_byte_stable(self, capsys):
        argv = ['verify', '--instance', 'so3_tilted', '--check', 'thm2', '--check', 'sym_skew',
                '--json']
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first

    def test_all_checks(self, capsys):
        assert main(['verify', '--instance', 'abelian_point', '--all', '--json']) == 0
        lines = _json_lines(capsys.readouterr().out)
        assert tuple(line['check'] for line in lines) == CHECK_IDS

    def test_unknown_check(self, capsys):
        assert main(['verify', '--instance', 'so3_bidiagonal', '--check', 'thm3']) == 2
        assert 'thm3' in capsys.readouterr().err

    def test_missing_metric(self, instance_file):
        path = instance_file('so3_bidiagonal', lambda data: data.pop('metric'))
        assert main(['verify', '--input', path, '--check', 'thm1']) == 2

    def test_incompatible_divergence_from_file(self, capsys, instance_file):
        def set_divergence(data):
            data['divergence'] = ['1', '0', '0', '0', '0', '0']
        path = instance_file('so3_bidiagonal', set_divergence)
        assert main(['verify', '--input', path, '--check', 'sym_iff_compat', '--json']) == 0
        assert _json_lines(capsys.readouterr().out)[0]['status'] == 'pass'

    def test_connection_from_file_required(self):
        assert main(['verify', '--instance', 'so3_bidiagonal', '--connection', 'file',
                     '--check', 'thm1']) == 2


class TestRicci:
    def test_product_total_ricci_vanishes(self, capsys):
        assert main(['ricci', '--instance', 'so3_product', '--kind', 'total', '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['kind'] == 'TOTAL'
        assert data['rows'] == [f"e{i}" for i in range(6)]
        assert all(x == '0' for row in data['values'] for x in row)

    def test_table_output(self, capsys):
        assert main(['ricci', '--instance', 'so3_bidiagonal', '--kind', 'sv+']) == 0
        out = capsys.readouterr().out
        assert 'Ric_SV+ of so3_bidiagonal' in out
        assert 'e0+' in out and 'e2-' in out

    def test_unknown_kind_is_usage_error(self):
        assert main(['ricci', '--instance', 'so3_bidiagonal', '--kind', 'bogus']) == 2


class TestFlow:
    def test_writes_trajectory(self, tmp_path, capsys):
        out = tmp_path / 'flow.csv'
        argv = ['flow', '--instance', 'so3_tilted', '--dt', '0.01', '--steps', '5',
                '--out', str(out), '--json']
        assert main(argv) == 0
        final = json.loads(capsys.readouterr().out)
        assert final['t'] == pytest.approx(0.05)
        assert len(pd.read_csv(out)) == 6

    def test_chart_instance_refused(self, capsys):
        argv = ['flow', '--instance', 'exact_chart_flat', '--dt', '0.01', '--steps', '3']
        assert main(argv) == 2
        assert 'NotHomogeneous' in capsys.readouterr().err

    def test_incompatible_divergence_aborts(self, capsys, instance_file):
        def set_divergence(data):
            data['divergence'] = ['1', '0', '0', '0', '0', '0']
        path = instance_file('so3_bidiagonal', set_divergence)
        assert main(['flow', '--input', path, '--dt', '0.01', '--steps', '3']) == 1
        assert 'Flow aborted' in capsys.readouterr().err


class TestExportAndSummary:
    def test_export_to_stdout(self, capsys):
        assert main(['export', '--instance', 'exact_chart_H']) == 0
        assert capsys.readouterr().out == export_instance(catalog('exact_chart_H'))

    def test_export_to_file(self, tmp_path):
        out = tmp_path / 'nested' / 'so3.json'
        assert main(['export', '--instance', 'so3_product', '--out', str(out)]) == 0
        assert main(['check', '--input', str(out)]) == 0

    def test_summary(self, tmp_path, capsys, instance_file):
        def perturb(data):
            data['structure'][0][1][2] = '2'
        main(['check', '--instance', 'abelian_point', '--json'])
        main(['check', '--input', instance_file('so3_product', perturb), '--json'])
        report = tmp_path / 'reports.jsonl'
        report.write_text(capsys.readouterr().out + 'not json\n')
        assert main(['summary', '--report', str(report)]) == 0
        captured = capsys.readouterr()
        assert 'Total Checks: 4' in captured.out
        assert 'malformed' in captured.err

    def test_no_command(self):
        assert main([]) == 2

import subprocess
import sys

import numpy as np
import pytest

from hamkrylov.cli import main
from hamkrylov.driver import CSV_COLUMNS
from hamkrylov.generators import load_matrix_market


@pytest.fixture(autouse=True)
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv('HAMKRYLOV_OUTDIR', str(tmp_path))
    return tmp_path


def test_gen_diag_logspace(outdir, capsys):
    assert main(['gen', '--kind', 'diag-logspace', '--n', '50', '--lo', '0.1',
                 '--hi', '1']) == 0
    H = load_matrix_market(str(outdir / 'diag-logspace-n50.mtx'))
    np.testing.assert_allclose(np.diag(H.E), np.logspace(-1, 0, 50))


def test_gen_jk_spd_reports_definiteness(outdir, capsys):
    assert main(['gen', '--kind', 'jk-spd', '--n', '20', '--seed', '7']) == 0
    assert 'ok' in capsys.readouterr().out
    assert (outdir / 'jk-spd-n20-s7.mtx').exists()


@pytest.mark.parametrize('argv', [
    ['gen', '--kind', 'diag-logspace', '--n', '5', '--lo', '-1'],
    ['gen', '--kind', 'diag-logspace', '--n', '0'],
    ['gen', '--kind', 'nope', '--n', '5'],
    ['build', '--columns', '4'],
    ['build', '--kind', 'jk-spd', '--n', '3', '--columns', '3'],
    ['build', '--kind', 'jk-spd', '--n', '3', '--columns', '40'],
    ['build', '--matrix', 'missing.mtx', '--columns', '2'],
    ['build', '--kind', 'jk-spd', '--n', '3', '--columns', '2',
     '--u', 'missing.txt'],
    ['sweep', '--kind', 'jk-spd', '--n', '3', '--methods', 'heks,foo'],
    ['sweep', '--kind', 'diag-logspace', '--n', '3000', '--functions', 'exp'],
])
def test_usage_errors_exit_one(argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_build_reports_cost(capsys):
    assert main(['build', '--kind', 'diag-logspace', '--n', '500',
                 '--columns', '30', '--reorth', 'none', '--count-mode',
                 'paper']) == 0
    out = capsys.readouterr().out
    assert 'total (recurrence count): 30 matvecs, 20 solves, 97 dots' in out
    assert 'symplectic residual' in out


def test_build_serious_breakdown_exit_two(capsys):
    assert main(['build', '--kind', 'diag-logspace', '--n', '10', '--u',
                 'e1', '--columns', '4']) == 2
    assert 'serious breakdown at stage 1: theta' in capsys.readouterr().out


def test_build_lucky_breakdown_exit_zero(outdir, capsys):
    u = np.zeros(12)
    u[[0, 1, 6, 7]] = [1.0, 2.0, 0.5, -1.0]
    np.savetxt(outdir / 'u.txt', u)
    assert main(['build', '--kind', 'diag-logspace', '--n', '6', '--u',
                 str(outdir / 'u.txt'), '--columns', '8']) == 0
    out = capsys.readouterr().out
    assert 'lucky breakdown' in out and 'notice' in out


@pytest.mark.parametrize('method', ['haml', 'eksm', 'arnoldi'])
def test_build_reference_methods(method, capsys):
    assert main(['build', '--kind', 'jk-spd', '--n', '6', '--method', method,
                 '--columns', '6', '--u', 'random']) == 0
    assert 'residual' in capsys.readouterr().out


def test_build_from_matrix_file_with_export(outdir):
    main(['gen', '--kind', 'jk-spd', '--n', '5', '--seed', '1',
          '--out', str(outdir / 'h.mtx')])
    assert main(['build', '--matrix', str(outdir / 'h.mtx'), '--columns',
                 '10', '--export', str(outdir / 'b'), '--format', 'bin']) == 0
    assert (outdir / 'b.manifest.json').exists()
    assert main(['build', '--matrix', str(outdir / 'h.mtx'), '--columns',
                 '4', '--export', str(outdir / 'c')]) == 0
    assert (outdir / 'c.coeffs.csv').exists()


def test_sweep_writes_csv(outdir, capsys):
    assert main(['sweep', '--kind', 'diag-logspace', '--n', '20',
                 '--functions', 'exp,sign', '--m-max', '10']) == 0
    lines = (outdir / 'sweep.csv').read_text().splitlines()
    assert lines[0] == ','.join(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * (5 + 5 + 5 + 5)



def test_sweep_survives_overflowing_cos(capsys):
    # cos of a +-800i spectrum is out of double range
    assert main(['sweep', '--kind', 'jk-spd', '--n', '100', '--seed', '11',
                 '--methods', 'heks', '--functions', 'exp,cos',
                 '--m-max', '4', '--out', '-']) == 0
    rows = [line.split(',') for line in
            capsys.readouterr().out.splitlines()[1:]]
    assert [r[-1] for r in rows if r[1] == 'cos'] == ['error', 'error']
    assert [r[-1] for r in rows if r[1] == 'exp'] == ['complete', 'complete']

def test_sweep_empty_function_list(capsys):
    assert main(['sweep', '--kind', 'diag-logspace', '--n', '10',
                 '--functions', '', '--out', '-']) == 0
    assert capsys.readouterr().out == ','.join(CSV_COLUMNS) + '\n'


def test_sweep_is_byte_stable(outdir):
    args = ['sweep', '--kind', 'jk-spd', '--n', '8', '--seed', '3',
            '--functions', 'exp,cos', '--u', 'random', '--u-seed', '4']
    main(args + ['--out', str(outdir / 'a.csv')])
    main(args + ['--out', str(outdir / 'b.csv'), '--jobs', '3'])
    assert (outdir / 'a.csv').read_bytes() == (outdir / 'b.csv').read_bytes()


def test_check_default_passes(capsys):
    assert main(['check', '--n', '6']) == 0
    assert '0 failed' in capsys.readouterr().out


def test_check_filtered_suite(capsys):
    assert main(['check', '--suite', 'theorem1', '--n', '5']) == 0
    out = capsys.readouterr().out
    assert out.count('PASS') == 6 and 'full-reduction' in out
    assert 'heks ' not in out


def test_check_injection_fails(capsys):
    assert main(['check', '--inject', 'beta-sign']) == 3
    out = capsys.readouterr().out
    assert 'FAIL  heks           zero pattern of H projection' in out


def test_module_entry_point():
    out = subprocess.run([sys.executable, '-m', 'hamkrylov', 'check',
                          '--suite', 'core', '--n', '3'],
                         capture_output=True, text=True)
    assert out.returncode == 0 and 'core' in out.stdout

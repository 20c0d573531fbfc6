import csv
import json

import numpy as np

from hamkrylov.export import export_binary, export_csv, load_binary
from hamkrylov.generators import gen_jk_spd
from hamkrylov.heks import heks_build


def _run():
    H = gen_jk_spd(5, 0)
    return heks_build(H, np.ones(10), target_columns=8)


def test_binary_round_trip(tmp_path):
    res = _run()
    prefix = str(tmp_path / 'run')
    paths = export_binary(prefix, res.basis.S, res.coeffs)
    assert len(paths) == 3
    S, coeffs = load_binary(prefix)
    np.testing.assert_array_equal(S, res.basis.S)
    for name, arr in res.coeffs.as_dict().items():
        np.testing.assert_array_equal(coeffs[name], arr)
    with open(prefix + '.manifest.json') as fh:
        man = json.load(fh)
    assert man['order'] == 'F' and man['basis_shape'] == [10, 8]


def test_binary_layout_is_column_major(tmp_path):
    S = np.arange(12.0).reshape(4, 3)
    export_binary(str(tmp_path / 'm'), S)
    flat = np.fromfile(str(tmp_path / 'm.basis.bin'), dtype='<f8')
    np.testing.assert_array_equal(flat, S.T.ravel())


def test_csv_export(tmp_path):
    res = _run()
    prefix = str(tmp_path / 'run')
    basis_path, coeff_path = export_csv(prefix, res.basis.S, res.coeffs)
    S = np.loadtxt(basis_path, delimiter=',')
    np.testing.assert_array_equal(S, res.basis.S)
    with open(coeff_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['name', 'index', 'value']
    theta = [float(v) for name, i, v in rows[1:] if name == 'theta']
    np.testing.assert_array_equal(theta, res.coeffs.theta)
    first = [r for r in rows[1:] if r[0] == 'theta'][0]
    assert first[1] == '1'


def test_csv_without_coefficients(tmp_path):
    paths = export_csv(str(tmp_path / 'q'), np.eye(2))
    assert len(paths) == 1

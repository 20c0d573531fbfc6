"""Basis and coefficient dumps for cross-checking other implementations.

Two layouts are written for a prefix ``p``:

* CSV: ``p.basis.csv`` holds the basis matrix row by row (``%.17g``) and
  ``p.coeffs.csv`` the rows ``name,index,value`` with 1-based indices.
* Flat binary: ``p.basis.bin`` is the basis in column-major order as
  little-endian float64, ``p.coeffs.bin`` the coefficient arrays back to
  back, and ``p.manifest.json`` the shapes and offsets.
"""
import csv
import json

import numpy as np

__all__ = ['export_csv', 'export_binary', 'load_binary']


def _coeff_arrays(coeffs):
    if coeffs is None:
        return {}
    items = coeffs.as_dict() if hasattr(coeffs, 'as_dict') else dict(coeffs)
    return {k: np.asarray(v, dtype=float).ravel() for k, v in items.items()}


def export_csv(prefix, S, coeffs=None):
    """Write ``prefix.basis.csv`` and, if given, ``prefix.coeffs.csv``."""
    S = np.asarray(S, dtype=float)
    paths = [prefix + '.basis.csv']
    with open(paths[0], 'w', newline='') as fh:
        w = csv.writer(fh, lineterminator='\n')
        for row in S:
            w.writerow(['%.17g' % x for x in row])
    arrays = _coeff_arrays(coeffs)
    if arrays:
        paths.append(prefix + '.coeffs.csv')
        with open(paths[1], 'w', newline='') as fh:
            w = csv.writer(fh, lineterminator='\n')
            w.writerow(['name', 'index', 'value'])
            for name, arr in arrays.items():
                for i, x in enumerate(arr, start=1):
                    w.writerow([name, i, '%.17g' % x])
    return paths


def export_binary(prefix, S, coeffs=None):
    """Write the flat binary layout; returns the written paths."""
    S = np.asarray(S, dtype=float)
    np.asfortranarray(S).ravel(order='F').astype('<f8').tofile(
        prefix + '.basis.bin')
    arrays = _coeff_arrays(coeffs)
    offsets, pos = {}, 0
    with open(prefix + '.coeffs.bin', 'wb') as fh:
        for name, arr in arrays.items():
            fh.write(arr.astype('<f8').tobytes())
            offsets[name] = [pos, int(arr.size)]
            pos += arr.size
    manifest = {'dtype': '<f8', 'order': 'F', 'basis_shape': list(S.shape),
                'coefficients': offsets}
    with open(prefix + '.manifest.json', 'w') as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return [prefix + '.basis.bin', prefix + '.coeffs.bin',
            prefix + '.manifest.json']


def load_binary(prefix):
    """Read back ``(S, {name: array})`` written by :func:`export_binary`."""
    with open(prefix + '.manifest.json') as fh:
        manifest = json.load(fh)
    shape = tuple(manifest['basis_shape'])
    S = np.fromfile(prefix + '.basis.bin', dtype='<f8').reshape(shape,
                                                                order='F')
    flat = np.fromfile(prefix + '.coeffs.bin', dtype='<f8')
    coeffs = {name: flat[off:off + size]
              for name, (off, size) in manifest['coefficients'].items()}
    return S, coeffs

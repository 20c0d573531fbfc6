"""Relative error of f(H)u against basis width on the log-uniform diagonal
test matrix (1000 x 1000), for both starting vectors.

    python3 demos/convergence_diag.py [n]
"""
import sys

import numpy as np

from hamkrylov import METHODS, convergence_sweep, gen_diag_logspace

n = int(sys.argv[1]) if len(sys.argv) > 1 else 500
H = gen_diag_logspace(n, 0.1, 1.0)
starts = {'ones': np.ones(2 * n),
          'random': np.random.default_rng(0).standard_normal(2 * n)}

for label, u in starts.items():
    rows = convergence_sweep(METHODS, ['exp', 'cos', 'sign'], H, u, 30)
    table = {(r.method, r.kind, r.columns): r for r in rows}
    for kind in ('exp', 'cos', 'sign'):
        print('\nf = %s, u = %s' % (kind, label))
        print('%7s' % 'columns' + ''.join('%11s' % m for m in METHODS))
        for w in range(2, 31, 2):
            cells = []
            for m in METHODS:
                r = table.get((m, kind, w))
                if r is None or r.rel_error is None:
                    cells.append('%11s' % (r.status if r else '-'))
                else:
                    cells.append('%11.2e' % r.rel_error)
            print('%7d' % w + ''.join(cells))

# The structured methods only gain on exp and cos every second stage: the
# even functions see u only through H^2, and alternate stages add the odd
# powers.

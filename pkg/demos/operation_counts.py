"""Operation counts of a 30-column basis of the 1000 x 1000 diagonal test
matrix, stage by stage, in both counting modes."""
import numpy as np

from hamkrylov import (HamiltonianOperator, OpCounters, eksm,
                       gen_diag_logspace, heks_build)
from hamkrylov.heks import tail_cost, stage_shape

H = gen_diag_logspace(500, 0.1, 1.0)
op = HamiltonianOperator.from_dense(H, counters=OpCounters())
u = np.ones(1000)

for mode in ('recurrence', 'full'):
    for reorth in ('none', 'one_pass'):
        res = heks_build(op.with_counters(), u, target_columns=30,
                         reorth=reorth, count_mode=mode)
        print('\nHEKS, reorth=%s, count_mode=%s' % (reorth, mode))
        print('stage   (r, s)   matvecs solves dots   +finalize')
        for stage, c in enumerate(res.stage_counters, start=1):
            r, s = stage_shape(stage)
            t = tail_cost(r, s, mode)
            print('%5d   (%2d,%2d)  %7d %6d %5d   %s'
                  % (stage, r, s, c[0], c[1], c[2],
                     tuple(a + b for a, b in zip(c, t))))
        print('total:', res.counters)

res = eksm(op.with_counters(), u, 30, reorth='none', count_mode='recurrence')
print('\nEKSM, 30 columns, no extra Gram-Schmidt pass:', res.counters)

# Two stages of the short recurrence cost 4 products with H, 3 solves and
# 14 scalar products however long the basis grows; EKSM's dot count grows
# quadratically with the width.

"""The two ways a HEKS build can stop early."""
import numpy as np

from hamkrylov import approximate, gen_diag_logspace, heks_build
from hamkrylov.jform import jmatrix

# Serious: e_1 is an eigenvector of a diagonal H, so u^T J H u = 0 and the
# first pair cannot be normalized.
H = gen_diag_logspace(50, 0.1, 1.0)
e1 = np.zeros(100)
e1[0] = 1.0
print(heks_build(H, e1, target_columns=10).status)

# Lucky: for H = J the first pair already spans the whole space.
res = heks_build(jmatrix(1), np.array([1.0, 0.0]), target_columns=4)
print(res.status)
print(res.basis.S)
print('exp(J) e_1 =', approximate('heks', 'exp', jmatrix(1),
                                  np.array([1.0, 0.0]), 2).vector)

# Lucky with a larger matrix: u touches only two eigenpairs of +-D.
u = np.zeros(100)
u[[0, 1, 50, 51]] = [1.0, 2.0, 0.5, -1.0]
res = heks_build(H, u, target_columns=20)
print(res.status, '->', res.basis.ncols, 'columns')

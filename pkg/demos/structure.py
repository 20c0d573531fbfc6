"""What J-orthogonality buys: the projected matrix of HEKS and Hamiltonian
Lanczos is Hamiltonian, so exp of it is symplectic and cos of it is
skew-Hamiltonian. The orthonormal bases give neither."""
import numpy as np

from hamkrylov import (arnoldi, assemble_projected_H, eksm, gen_jk_spd,
                       hamiltonian_lanczos, hamiltonian_residual, heks_build,
                       symplectic_residual)
from hamkrylov.matfunc import cosm_dense, expm_dense
from hamkrylov.jform import skew_hamiltonian_residual

H = gen_jk_spd(50, 2)
u = np.random.default_rng(2).standard_normal(100)
m = 24

projections = {
    'heks': assemble_projected_H(heks_build(H, u, target_columns=m).coeffs),
    'haml': hamiltonian_lanczos(H, u, m // 2).projected,
    'eksm': eksm(H, u, m).projected,
    'arnoldi': arnoldi(H, u, m).projected,
}

print('%-8s %14s %16s %18s' % ('method', 'Hamiltonian', 'exp symplectic',
                               'cos skew-Ham.'))
for name, P in projections.items():
    E, C = expm_dense(P), cosm_dense(P)
    print('%-8s %14.1e %16.1e %18.1e'
          % (name, hamiltonian_residual(P) / np.linalg.norm(P),
             symplectic_residual(E) / np.linalg.norm(E) ** 2,
             skew_hamiltonian_residual(C, relative=True)))

# The eigenvalues of H = J K are purely imaginary, and so are those of the
# Hamiltonian projections; the sign function is undefined there.
ev = np.linalg.eigvals(projections['heks'])
print('\nmax |Re| over the HEKS projection spectrum: %.1e'
      % np.abs(ev.real).max())

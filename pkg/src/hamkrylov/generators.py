"""Test-matrix generators and Matrix Market ingestion."""
import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sp

from .errors import DimensionError, MatrixParseError, StructureError
from .jform import hamiltonian_residual, jmatrix, jtmul
from .operators import DenseHamiltonian

__all__ = ['gen_diag_logspace', 'gen_jk_spd', 'gen_real_spectrum',
           'random_symplectic', 'load_matrix_market',
           'save_matrix_market', 'HAMILTONIAN_RTOL']

HAMILTONIAN_RTOL = 1e-8


def gen_diag_logspace(n, lo, hi):
    """``H = diag(D, -D)`` with ``D`` holding ``n`` log-uniform points of
    ``[lo, hi]``.

    ``gen_diag_logspace(500, 0.1, 1)`` is the 1000 x 1000 test matrix with
    ``D = diag(logspace(-1, 0, 500))``.
    """
    n = int(n)
    if n < 1:
        raise DimensionError('n must be positive')
    if not lo > 0:
        raise ValueError('lower end must be positive, got %r' % lo)
    if not hi > lo:
        raise ValueError('need lo < hi, got [%r, %r]' % (lo, hi))
    d = np.logspace(np.log10(lo), np.log10(hi), n)
    zero = np.zeros((n, n))
    return DenseHamiltonian(np.diag(d), zero, zero)


def gen_jk_spd(n, seed):
    """``H = J K`` with ``K = A^T A + 2n I`` for a seeded Gaussian ``A``.

    Every quantity ``w^T J H w = -w^T K w`` is negative, so the HEKS
    normalization scalars cannot vanish. Note that the spectrum of such
    an ``H`` is purely imaginary.
    """
    n = int(n)
    if n < 1:
        raise DimensionError('n must be positive')
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2 * n, 2 * n))
    K = A.T @ A + 2 * n * np.eye(2 * n)
    K = 0.5 * (K + K.T)
    # J K = [[K21, K22], [-K11, -K12]]
    return DenseHamiltonian(K[n:, :n], K[n:, n:], -K[:n, :n])


def random_symplectic(n, seed, scale=0.3):
    """``exp(W)`` for a seeded random Hamiltonian ``W`` with ``||W||_2 =
    scale``; the result is symplectic and well conditioned."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2 * n, 2 * n))
    W = -jmatrix(n) @ (A + A.T)
    W *= scale / np.linalg.norm(W, 2)
    return scipy.linalg.expm(W)


def gen_real_spectrum(n, seed, lo=0.5, hi=2.0):
    """Dense Hamiltonian ``S diag(D, -D) S^{-1}`` with ``S`` symplectic
    (:func:`random_symplectic`) and ``D`` as in :func:`gen_diag_logspace`.

    Its eigenvalues are ``+-D``, so ``sign(H)`` is defined.
    """
    S = random_symplectic(n, seed)
    Sinv = jtmul(jtmul(S).T)
    M = S @ gen_diag_logspace(n, lo, hi).matrix @ Sinv
    return DenseHamiltonian.from_matrix(M)


def load_matrix_market(path, sparse=False):
    """Read a real Matrix Market file holding a Hamiltonian matrix.

    Returns a :class:`DenseHamiltonian`, or a ``scipy.sparse`` CSC matrix
    when ``sparse`` is true. Raises :class:`MatrixParseError`,
    :class:`DimensionError` or :class:`StructureError`.
    """
    try:
        M = scipy.io.mmread(path)
    except (ValueError, IndexError, TypeError, OSError) as exc:
        raise MatrixParseError('cannot parse %s: %s' % (path, exc)) from exc
    if np.iscomplexobj(M.data if sp.issparse(M) else M):
        raise MatrixParseError('complex matrices are not supported')
    if M.shape[0] != M.shape[1]:
        raise DimensionError('matrix must be square, got %s' % (M.shape,))
    if M.shape[0] % 2:
        raise DimensionError('matrix dimension must be even, got %d'
                             % M.shape[0])
    if sparse:
        M = sp.csc_matrix(M, dtype=float)
        dense = M.toarray() if M.shape[0] <= 4000 else None
        if dense is not None:
            _check(dense)
        return M
    dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    _check(dense)
    return DenseHamiltonian.from_matrix(dense, rtol=HAMILTONIAN_RTOL)


def _check(M):
    res = hamiltonian_residual(M)
    if res > HAMILTONIAN_RTOL * np.linalg.norm(M):
        raise StructureError('matrix is not Hamiltonian: ||JM - (JM)^T||_F = '
                             '%.3e' % res)


def save_matrix_market(path, H, comment=''):
    """Write a Hamiltonian (dense or sparse) in coordinate format."""
    M = H.matrix if isinstance(H, DenseHamiltonian) else H
    scipy.io.mmwrite(path, sp.coo_matrix(M), comment=comment, field='real',
                     symmetry='general')

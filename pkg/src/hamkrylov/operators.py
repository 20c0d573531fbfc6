"""Hamiltonian matrices, counted operators and the structured solver."""
import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack

from .errors import DimensionError, SingularMatrixError, StructureError
from .jform import hamiltonian_residual, jmul

__all__ = ['OpCounters', 'DenseHamiltonian', 'HamiltonianOperator',
           'solve_hamiltonian', 'as_operator']

SYMMETRIZE_RTOL = 1e-12


class OpCounters:
    """Tallies of matrix-vector products, linear solves and scalar products.

    Increments are serialized with a lock so that one counter object can be
    shared by threads.
    """

    __slots__ = ('matvecs', 'solves', 'dots', '_lock')

    def __init__(self, matvecs=0, solves=0, dots=0):
        self.matvecs = int(matvecs)
        self.solves = int(solves)
        self.dots = int(dots)
        self._lock = threading.Lock()

    def add(self, matvecs=0, solves=0, dots=0):
        with self._lock:
            self.matvecs += matvecs
            self.solves += solves
            self.dots += dots

    def reset(self):
        with self._lock:
            self.matvecs = self.solves = self.dots = 0

    def snapshot(self):
        """Return ``(matvecs, solves, dots)``."""
        with self._lock:
            return (self.matvecs, self.solves, self.dots)

    def as_dict(self):
        m, s, d = self.snapshot()
        return {'matvecs': m, 'solves': s, 'dots': d}

    def __eq__(self, other):
        if isinstance(other, OpCounters):
            return self.snapshot() == other.snapshot()
        return self.snapshot() == tuple(other)

    def __repr__(self):
        return 'OpCounters(matvecs=%d, solves=%d, dots=%d)' % self.snapshot()


def _symmetric_block(M, name):
    M = np.array(M, dtype=float)
    scale = max(np.linalg.norm(M), 1.0)
    asym = np.linalg.norm(M - M.T)
    if asym > SYMMETRIZE_RTOL * scale:
        raise StructureError('block %s is not symmetric (||%s - %s^T||_F = '
                             '%.3e)' % (name, name, name, asym))
    return 0.5 * (M + M.T)


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    """A Hamiltonian matrix ``[[E, B], [C, -E^T]]`` with ``B``, ``C``
    symmetric.

    ``B`` and ``C`` are symmetrized when they are symmetric up to a relative
    ``1e-12``; larger asymmetry raises :class:`StructureError`.
    """

    E: np.ndarray
    B: np.ndarray
    C: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise DimensionError('E must be square, got %s' % (E.shape,))
        n = E.shape[0]
        B = _symmetric_block(self.B, 'B')
        C = _symmetric_block(self.C, 'C')
        if B.shape != (n, n) or C.shape != (n, n):
            raise DimensionError('blocks must all be %d x %d' % (n, n))
        for name, blk in (('E', E), ('B', B), ('C', C)):
            blk.setflags(write=False)
            object.__setattr__(self, name, blk)

    @property
    def n(self):
        return self.E.shape[0]

    @property
    def dim(self):
        return 2 * self.n

    @classmethod
    def from_matrix(cls, M, rtol=1e-8):
        """Split a dense ``2n x 2n`` matrix into Hamiltonian blocks.

        The matrix is accepted when ``hamiltonian_residual(M) <= rtol *
        ||M||_F``; it is then projected onto the Hamiltonian matrices.
        """
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError('expected a square matrix, got %s'
                                 % (M.shape,))
        if M.shape[0] % 2:
            raise DimensionError('Hamiltonian matrices have even size, got %d'
                                 % M.shape[0])
        res = hamiltonian_residual(M)
        if res > rtol * np.linalg.norm(M):
            raise StructureError('matrix is not Hamiltonian: ||JM - (JM)^T||_F'
                                 ' = %.3e' % res)
        n = M.shape[0] // 2
        E = 0.5 * (M[:n, :n] - M[n:, n:].T)
        B = 0.5 * (M[:n, n:] + M[:n, n:].T)
        C = 0.5 * (M[n:, :n] + M[n:, :n].T)
        return cls(E, B, C)

    @property
    def matrix(self):
        M = self._cache.get('matrix')
        if M is None:
            M = np.block([[self.E, self.B], [self.C, -self.E.T]])
            M.setflags(write=False)
            self._cache['matrix'] = M
        return M

    def toarray(self):
        return np.array(self.matrix)

    def __matmul__(self, other):
        return self.matrix @ other

    def _factor(self):
        fac = self._cache.get('ldl')
        if fac is None:
            JH = jmul(self.matrix)
            JH = 0.5 * (JH + JH.T)
            ldu, ipiv, info = lapack.dsytrf(JH, lower=1)
            if info > 0:
                raise SingularMatrixError('J H is exactly singular '
                                          '(pivot %d)' % info)
            anorm = np.abs(JH).sum(axis=0).max()
            rcond, _ = lapack.dsycon(ldu, ipiv, anorm, lower=1)
            if anorm == 0.0 or rcond < 10 * np.finfo(float).eps:
                raise SingularMatrixError('H is singular to working precision '
                                          '(rcond = %.2e)' % rcond)
            fac = (ldu, ipiv)
            self._cache['ldl'] = fac
        return fac


def solve_hamiltonian(H, b, counters=None):
    """Solve ``H x = b`` through the symmetric system ``(J H) x = J b``.

    One symmetric indefinite (Bunch-Kaufman) factorization of ``J H`` is
    computed per matrix and cached. ``b`` may hold several columns; each
    column counts as one solve.
    """
    ldu, ipiv = H._factor()
    b = np.asarray(b, dtype=float)
    if b.shape[0] != H.dim:
        raise DimensionError('right-hand side has length %d, expected %d'
                             % (b.shape[0], H.dim))
    rhs = jmul(b)
    x, info = lapack.dsytrs(ldu, ipiv, rhs.reshape(H.dim, -1), lower=1)
    if info != 0:  # pragma: no cover - only for illegal arguments
        raise SingularMatrixError('dsytrs failed with info = %d' % info)
    if counters is not None:
        counters.add(solves=1 if b.ndim == 1 else b.shape[1])
    return x.reshape(b.shape)


class HamiltonianOperator:
    """A nonsingular Hamiltonian matrix seen through ``v -> Hv`` and
    ``v -> H^{-1} v``.

    Every call to :meth:`apply` or :meth:`apply_inverse` is tallied in
    ``counters``. ``dense`` holds the dense matrix when one is available
    (needed for oracles and explicit projections).
    """

    def __init__(self, apply, apply_inverse, dim, counters=None, dense=None,
                 name=None):
        if dim % 2:
            raise DimensionError('operator dimension must be even, got %d'
                                 % dim)
        self._apply = apply
        self._apply_inverse = apply_inverse
        self.dim = int(dim)
        self.counters = counters if counters is not None else OpCounters()
        self.dense = dense
        self.name = name

    @property
    def n(self):
        return self.dim // 2

    def apply(self, v):
        self.counters.add(matvecs=1)
        return np.asarray(self._apply(v), dtype=float)

    def apply_inverse(self, v):
        self.counters.add(solves=1)
        return np.asarray(self._apply_inverse(v), dtype=float)

    def apply_raw(self, v):
        """``H v`` without tallying; for oracles and diagnostics only."""
        return np.asarray(self._apply(v), dtype=float)

    def apply_inverse_raw(self, v):
        """``H^{-1} v`` without tallying."""
        return np.asarray(self._apply_inverse(v), dtype=float)

    def with_counters(self, counters=None):
        """A copy that shares the matrix data but owns fresh counters."""
        return HamiltonianOperator(self._apply, self._apply_inverse, self.dim,
                                   counters=counters, dense=self.dense,
                                   name=self.name)

    def toarray(self):
        if self.dense is None:
            raise ValueError('no dense representation available')
        if isinstance(self.dense, DenseHamiltonian):
            return np.array(self.dense.matrix)
        return np.asarray(self.dense.toarray() if sp.issparse(self.dense)
                          else self.dense, dtype=float)

    def fro_norm(self):
        if sp.issparse(self.dense):
            return float(spla.norm(self.dense))
        return float(np.linalg.norm(self.toarray()))

    @classmethod
    def from_dense(cls, H, counters=None, name=None):
        if not isinstance(H, DenseHamiltonian):
            H = DenseHamiltonian.from_matrix(H)
        H._factor()
        M = H.matrix
        return cls(lambda v: M @ v, lambda v: solve_hamiltonian(H, v),
                   H.dim, counters=counters, dense=H, name=name)

    @classmethod
    def from_sparse(cls, M, counters=None, name=None, check=True):
        """Wrap a sparse Hamiltonian matrix; solves use a sparse LU of H."""
        M = sp.csc_matrix(M, dtype=float)
        if M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise DimensionError('expected an even square matrix, got %s'
                                 % (M.shape,))
        if check:
            JM = sp.vstack([M[M.shape[0] // 2:], -M[:M.shape[0] // 2]])
            res = spla.norm(JM - JM.T) if JM.nnz else 0.0
            if res > 1e-8 * max(spla.norm(M), np.finfo(float).tiny):
                raise StructureError('matrix is not Hamiltonian: residual '
                                     '%.3e' % res)
        try:
            lu = spla.splu(M)
        except RuntimeError as exc:
            raise SingularMatrixError(str(exc)) from exc
        return cls(lambda v: M @ v, lu.solve, M.shape[0], counters=counters,
                   dense=M, name=name)


def as_operator(H, counters=None):
    """Coerce a :class:`DenseHamiltonian`, array or sparse matrix to an
    operator; operators are returned unchanged."""
    if isinstance(H, HamiltonianOperator):
        return H
    if sp.issparse(H):
        return HamiltonianOperator.from_sparse(H, counters=counters)
    return HamiltonianOperator.from_dense(H, counters=counters)

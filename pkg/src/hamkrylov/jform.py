"""Primitives for the canonical skew form ``J_n = [[0, I], [-I, 0]]``.

``J`` is never stored; every product with it is a half swap with a sign
flip. Residual helpers measure how far a dense matrix is from being
Hamiltonian, skew-Hamiltonian or (rectangular) symplectic.
"""
import numpy as np

from .errors import DimensionError

__all__ = ['JForm', 'jmul', 'jtmul', 'jdot', 'jmatrix', 'norm2',
           'hamiltonian_residual', 'skew_hamiltonian_residual',
           'symplectic_residual', 'left_inverse', 'j_orthogonalize']


class JForm:
    """The matrix ``J_n`` of half-dimension ``n`` as a lazy operator."""

    __slots__ = ('n',)

    def __init__(self, n):
        n = int(n)
        if n < 1:
            raise DimensionError('half-dimension must be positive, got %d' % n)
        self.n = n

    @property
    def shape(self):
        return (2 * self.n, 2 * self.n)

    def __matmul__(self, other):
        other = np.asarray(other)
        if other.shape[0] != 2 * self.n:
            raise DimensionError('expected leading size %d, got %d'
                                 % (2 * self.n, other.shape[0]))
        return jmul(other)

    def transpose(self):
        return _JT(self.n)

    T = property(transpose)

    def toarray(self):
        return jmatrix(self.n)

    def __repr__(self):
        return 'JForm(n=%d)' % self.n


class _JT(JForm):
    __slots__ = ()

    def __matmul__(self, other):
        return jtmul(np.asarray(other))

    def transpose(self):
        return JForm(self.n)

    T = property(transpose)

    def toarray(self):
        return jmatrix(self.n).T


def _half(v):
    m = v.shape[0]
    if m % 2:
        raise DimensionError('J-products need an even leading dimension, '
                             'got %d' % m)
    return m // 2


def jmul(v):
    """Return ``J v`` for a vector or a stack of columns ``v``.

    For ``v = [v1; v2]`` the result is ``[v2; -v1]``.
    """
    v = np.asarray(v)
    h = _half(v)
    out = np.empty_like(v)
    out[:h] = v[h:]
    out[h:] = -v[:h]
    return out


def jtmul(v):
    """Return ``J^T v = -J v``, i.e. ``[-v2; v1]``."""
    v = np.asarray(v)
    h = _half(v)
    out = np.empty_like(v)
    out[:h] = -v[h:]
    out[h:] = v[:h]
    return out


def jdot(x, y, counters=None):
    """Skew form ``<x, y>_J = y^T J x``.

    Increments ``counters.dots`` by one when a counter object is given.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError('jdot needs two vectors of equal length, got '
                             '%s and %s' % (x.shape, y.shape))
    h = _half(x)
    if counters is not None:
        counters.add(dots=1)
    # y^T J x = y1.x2 - y2.x1
    return float(y[:h] @ x[h:] - y[h:] @ x[:h])


def norm2(x, counters=None):
    """Euclidean norm, counted as one scalar product."""
    if counters is not None:
        counters.add(dots=1)
    return float(np.sqrt(x @ x))


def jmatrix(n):
    """Dense ``J_n``; only meant for tests and small diagnostics."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _square_even(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError('expected a square matrix, got shape %s'
                             % (M.shape,))
    _half(M)
    return M


def hamiltonian_residual(M):
    """``||J M - (J M)^T||_F``; zero iff ``M`` is Hamiltonian."""
    JM = jmul(_square_even(M))
    return float(np.linalg.norm(JM - JM.T))


def skew_hamiltonian_residual(M, relative=False):
    """``||J M + (J M)^T||_F``; zero iff ``M`` is skew-Hamiltonian.

    With ``relative=True`` the value is divided by ``||M||_F``. ``M`` is
    rescaled by its largest entry first, so the ratio stays finite for
    matrices whose norm overflows (``cos`` of a large imaginary spectrum).
    """
    M = _square_even(M)
    if relative:
        peak = float(np.abs(M).max()) if M.size else 0.0
        if peak == 0.0:
            return 0.0
        M = M / peak
    JM = jmul(M)
    res = float(np.linalg.norm(JM + JM.T))
    return res / float(np.linalg.norm(M)) if relative else res


def symplectic_residual(S):
    """``||S^T J_n S - J_m||_F`` for a ``2n x 2m`` matrix ``S``."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2:
        raise DimensionError('expected a matrix')
    _half(S)
    if S.shape[1] % 2:
        raise DimensionError('column count must be even, got %d'
                             % S.shape[1])
    G = S.T @ jmul(S)
    return float(np.linalg.norm(G - jmatrix(S.shape[1] // 2)))


def left_inverse(S):
    """``J_m^T S^T J_n``, the left inverse of a J-orthogonal ``S``."""
    S = np.asarray(S, dtype=float)
    # S^T J_n = (J_n^T S)^T
    return jtmul(jtmul(S).T)


def j_orthogonalize(w, P1, P2, passes=1):
    """Remove from ``w`` its component in ``range([P1 | P2])``.

    ``[P1 | P2]`` must be J-orthogonal with column ``i`` of ``P1`` paired to
    column ``i`` of ``P2``; the update is ``w <- w - S J^T S^T J w``. Each
    pass costs ``2 * P1.shape[1]`` scalar products, which the caller tallies.
    """
    for _ in range(passes):
        Jw = jmul(w)
        c1 = P1.T @ Jw
        c2 = P2.T @ Jw
        w = w + P1 @ c2 - P2 @ c1
    return w

"""Projected matrices of a HEKS basis, assembled from recurrence scalars,
together with the dense checks that validate them.

Column order of every projected matrix follows
``[y_s .. y_1, u_1 .. u_r | x_s .. x_1, v_1 .. v_r]``. Entry ``(p, q)`` of
``J^T S^T J H S`` is the coefficient of column ``p`` in ``H`` applied to
column ``q``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .jform import left_inverse
from .operators import DenseHamiltonian, HamiltonianOperator, solve_hamiltonian

__all__ = ['assemble_projected_H', 'assemble_projected_Hinv',
           'projected_pattern', 'explicit_projection', 'ZeroPatternReport',
           'zero_pattern_report', 'validate_zero_pattern',
           'inverse_block_residual', 'recurrence_residual']


class _Index:
    """0-based positions of the named columns for a given ``(r, s)``."""

    def __init__(self, r, s):
        self.r, self.s, self.m = r, s, r + s

    def y(self, j):
        return self.s - j

    def u(self, j):
        return self.s + j - 1

    def x(self, j):
        return self.m + self.s - j

    def v(self, j):
        return self.m + self.s + j - 1


def _shape(coeffs, r, s):
    r = coeffs.r if r is None else r
    s = coeffs.s if s is None else s
    if not (r == s or r == s + 1) or r > coeffs.r or s > coeffs.s:
        raise DimensionError('invalid stage shape (r, s) = (%d, %d) for '
                             'coefficients of shape (%d, %d)'
                             % (r, s, coeffs.r, coeffs.s))
    return r, s


def assemble_projected_H(coeffs, r=None, s=None):
    """``H_{r+s} = [[0, 0, Lam, B], [0, 0, B^T, T], [Del, 0, 0, 0],
    [0, Theta, 0, 0]]``.

    ``Del = diag(delta_s .. delta_1)``, ``Lam = diag(lam_s .. lam_1)``,
    ``Theta = diag(theta_1 .. theta_r)``, ``T`` is symmetric tridiagonal
    with diagonal ``alpha`` and off-diagonal ``beta_2 .. beta_r``; row
    ``y_j`` of ``B`` holds ``gamma_j`` in column ``v_j`` and ``mu_{j+1}``
    in column ``v_{j+1}``.
    """
    r, s = _shape(coeffs, r, s)
    ix = _Index(r, s)
    M = np.zeros((2 * ix.m, 2 * ix.m))
    c = coeffs
    for j in range(1, s + 1):
        M[ix.x(j), ix.y(j)] = c.delta[j - 1]
        M[ix.y(j), ix.x(j)] = c.lam[j - 1]
        M[ix.y(j), ix.v(j)] = M[ix.u(j), ix.x(j)] = c.gamma[j - 1]
        if j + 1 <= r:
            M[ix.y(j), ix.v(j + 1)] = M[ix.u(j + 1), ix.x(j)] = c.mu[j]
    for j in range(1, r + 1):
        M[ix.v(j), ix.u(j)] = c.theta[j - 1]
        M[ix.u(j), ix.v(j)] = c.alpha[j - 1]
        if j >= 2:
            M[ix.u(j), ix.v(j - 1)] = M[ix.u(j - 1), ix.v(j)] = c.beta[j - 1]
    return M


def assemble_projected_Hinv(coeffs, r=None, s=None):
    """``[[0, 0, Del^{-1}, 0], [0, 0, 0, Theta^{-1}], [E, G, 0, 0],
    [G^T, F, 0, 0]]``, the projection of ``H^{-1}``.

    ``E`` is symmetric tridiagonal (``e_jj``, ``e_{j,j+1}``), ``F`` diagonal
    and ``G`` has ``g_jj`` and ``g_{j,j+1}`` in rows ``x_j``.
    """
    r, s = _shape(coeffs, r, s)
    ix = _Index(r, s)
    M = np.zeros((2 * ix.m, 2 * ix.m))
    c = coeffs
    for j in range(1, s + 1):
        M[ix.y(j), ix.x(j)] = 1.0 / c.delta[j - 1]
        M[ix.x(j), ix.y(j)] = c.e_diag[j - 1]
        if j >= 2:
            M[ix.x(j - 1), ix.y(j)] = M[ix.x(j), ix.y(j - 1)] = c.e_off[j - 2]
        M[ix.x(j), ix.u(j)] = M[ix.v(j), ix.y(j)] = c.g_diag[j - 1]
        if j + 1 <= r:
            M[ix.x(j), ix.u(j + 1)] = M[ix.v(j + 1), ix.y(j)] = c.g_off[j - 1]
    for j in range(1, r + 1):
        M[ix.u(j), ix.v(j)] = 1.0 / c.theta[j - 1]
        M[ix.v(j), ix.u(j)] = c.f[j - 1]
    return M


def inverse_block_residual(coeffs, r=None, s=None):
    """``||[Lam B; B^T T] [E G; G^T F] - I||_F``.

    The product is the identity when ``S`` is square (full reduction); for a
    partial basis the projection of ``H^{-1}`` is not the inverse of the
    projection of ``H`` and the residual is ``O(1)``.
    """
    r, s = _shape(coeffs, r, s)
    m = r + s
    A = assemble_projected_H(coeffs, r, s)[:m, m:]
    K = assemble_projected_Hinv(coeffs, r, s)[m:, :m]
    return float(np.linalg.norm(A @ K - np.eye(m)))


def projected_pattern(r, s, which='H'):
    """Boolean mask of the entries that may be nonzero."""
    from .heks import HeksCoefficients
    ones = HeksCoefficients(
        delta=np.ones(s), lam=np.ones(s), theta=np.ones(r),
        alpha=np.ones(r), beta=np.ones(max(r, 1)), gamma=np.ones(s),
        mu=np.ones(max(r, 1)), e_diag=np.ones(s),
        e_off=np.ones(max(s - 1, 0)), f=np.ones(r), g_diag=np.ones(s),
        g_off=np.ones(max(r - 1, 0)))
    if which == 'H':
        return assemble_projected_H(ones, r, s) != 0
    if which == 'Hinv':
        return assemble_projected_Hinv(ones, r, s) != 0
    raise ValueError("which must be 'H' or 'Hinv'")


def _dense(H):
    if isinstance(H, HamiltonianOperator):
        H = H.dense
    if H is None:
        raise ValueError('a dense matrix is required for explicit checks')
    if not isinstance(H, DenseHamiltonian):
        H = DenseHamiltonian.from_matrix(
            H.toarray() if hasattr(H, 'toarray') else H)
    return H


def explicit_projection(H, S, inverse=False):
    """``J^T S^T J H S`` (or with ``H^{-1}``) formed densely.

    This is an oracle: no operation is counted.
    """
    Hd = _dense(H)
    HS = solve_hamiltonian(Hd, S) if inverse else Hd.matrix @ S
    return left_inverse(S) @ HS


@dataclass
class ZeroPatternReport:
    """Largest deviations of an explicit projection from the assembled one.

    ``max_offpattern`` is taken over structurally zero entries,
    ``max_mismatch`` over all entries; both are absolute. ``scale`` is
    ``||H||_F`` (or ``||H^{-1}||_F`` for the inverse projection).
    """

    max_offpattern: float
    max_mismatch: float
    scale: float


def _stage_shape(basis, coeffs, stage):
    if stage is None:
        return _shape(coeffs, None, None)
    return _shape(coeffs, (stage + 1) // 2, stage // 2)


def zero_pattern_report(H, basis, coeffs, stage=None, inverse=False):
    """Compare ``J^T S^T J H S`` (or ``H^{-1}``) with the assembled projection
    of the stage-``stage`` sub-basis (default: the whole basis)."""
    r, s = _stage_shape(basis, coeffs, stage)
    S = basis.matrix(r, s)
    Hd = _dense(H)
    explicit = explicit_projection(Hd, S, inverse=inverse)
    if inverse:
        assembled = assemble_projected_Hinv(coeffs, r, s)
        scale = _inv_norm(Hd)
    else:
        assembled = assemble_projected_H(coeffs, r, s)
        scale = float(np.linalg.norm(Hd.matrix))
    mask = projected_pattern(r, s, 'Hinv' if inverse else 'H')
    off = np.abs(explicit[~mask])
    return ZeroPatternReport(
        max_offpattern=float(off.max()) if off.size else 0.0,
        max_mismatch=float(np.abs(explicit - assembled).max()),
        scale=scale)


def validate_zero_pattern(H, basis, coeffs, stage=None, inverse=False):
    """Largest entry of the explicit projection minus the assembled one.

    Because the assembled matrix vanishes off its pattern, this bounds the
    off-pattern entries as well.
    """
    return zero_pattern_report(H, basis, coeffs, stage, inverse).max_mismatch


def _inv_norm(Hd):
    key = 'inv_fro'
    val = Hd._cache.get(key)
    if val is None:
        val = float(np.linalg.norm(solve_hamiltonian(Hd, np.eye(Hd.dim))))
        Hd._cache[key] = val
    return val


def recurrence_residual(H, basis, coeffs, stage=None):
    """Relative residuals of the forward and inverse HEKS recurrences.

    Returns ``{'forward': ||H S_m - S_m H_m - R_m||_F / ||H||_F,
    'inverse': ||H^{-1} S_m - S_m K_m - Q_m||_F / ||H^{-1}||_F}`` where
    ``K_m`` is the projection of ``H^{-1}`` and ``R_m``, ``Q_m`` collect the
    components pointing outside ``range(S_m)``. These involve vectors of
    stages ``m+1`` and ``m+2``, so by default ``m`` is two stages below the
    basis (or the basis itself when it is exhausted). A missing term is taken
    as zero only for an exhausted basis; otherwise ``ValueError`` is raised.
    """
    if stage is None:
        stage = basis.stage if basis.exhausted else basis.stage - 2
    if stage < 1:
        raise ValueError('basis too short for a recurrence check')
    Hd = _dense(H)
    fwd = _recurrence_abs(Hd, basis, coeffs, stage, inverse=False)
    inv = _recurrence_abs(Hd, basis, coeffs, stage, inverse=True)
    return {'forward': fwd / float(np.linalg.norm(Hd.matrix)),
            'inverse': inv / _inv_norm(Hd)}


def _recurrence_abs(Hd, basis, coeffs, stage, inverse):
    r, s = (stage + 1) // 2, stage // 2
    _shape(coeffs, r, s)
    S = basis.matrix(r, s)
    ix = _Index(r, s)
    c = coeffs
    exhausted = basis.exhausted

    def vec(block, j):
        mat = {'u': basis.U, 'v': basis.V, 'x': basis.X, 'y': basis.Y}[block]
        if j <= mat.shape[1]:
            return mat[:, j - 1]
        if exhausted:
            return None
        raise ValueError('stage %d needs %s_%d; extend the basis by two '
                         'stages' % (stage, block, j))

    def coef(arr, i):
        if 0 <= i < len(arr):
            return arr[i]
        if exhausted:
            return 0.0
        raise ValueError('stage %d needs a coefficient the basis has not '
                         'produced yet' % stage)

    R = np.zeros_like(S)

    def put(col, scalar, v):
        if v is not None:
            R[:, col] += scalar * v

    k = s
    if not inverse:
        target = Hd.matrix @ S - S @ assemble_projected_H(c, r, s)
        if stage % 2 == 0:
            uk1 = vec('u', k + 1)
            put(ix.x(k), coef(c.mu, k), uk1)
            put(ix.v(k), coef(c.beta, k), uk1)
        else:
            put(ix.v(r), coef(c.gamma, r - 1), vec('y', r))
            put(ix.v(r), coef(c.beta, r), vec('u', r + 1))
    else:
        target = solve_hamiltonian(Hd, S) - S @ assemble_projected_Hinv(c, r, s)
        if stage % 2 == 0:
            put(ix.y(k), coef(c.e_off, k - 1), vec('x', k + 1))
            put(ix.y(k), coef(c.g_off, k - 1), vec('v', k + 1))
        else:
            if k >= 1:
                put(ix.y(k), coef(c.e_off, k - 1), vec('x', k + 1))
            put(ix.u(k + 1), coef(c.g_diag, k), vec('x', k + 1))
    return float(np.linalg.norm(target - R))

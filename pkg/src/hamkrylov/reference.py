"""Baseline basis builders: Hamiltonian Lanczos, the extended Krylov subspace
method (EKSM) and Arnoldi.

Hamiltonian Lanczos is the forward half of the HEKS recurrence: with no
inverse pairs the short recurrence ``w = H v_k - beta_k u_{k-1} -
alpha_k u_k`` produces a J-orthogonal basis ``[U | V]`` of
``K_{2l}(H, u)`` whose projection ``[[0, T], [Theta, 0]]`` is Hamiltonian.
Several published symplectic Lanczos variants exist; this one normalizes
``u_k`` in the 2-norm.

EKSM and Arnoldi produce orthonormal bases with long (Gram-Schmidt)
recurrences; their projections ``Q^T H Q`` are not Hamiltonian in general.
"""
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .heks import BreakdownReport, SymplecticBasis, normalize_count_mode
from .jform import j_orthogonalize, jdot, norm2
from .operators import as_operator

__all__ = ['OrthonormalBasis', 'LanczosResult', 'hamiltonian_lanczos',
           'eksm', 'arnoldi']

_PASSES = {'none': 0, 'one_pass': 1, 'two_pass': 2}


def _check_opts(reorth, count_mode):
    if reorth not in _PASSES:
        raise ValueError('reorth must be one of %s' % (tuple(_PASSES),))
    return normalize_count_mode(count_mode)


def _start(op, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (op.dim,):
        raise ValueError('starting vector has shape %s, operator dimension '
                         'is %d' % (u.shape, op.dim))
    return u


@dataclass
class OrthonormalBasis:
    """Orthonormal columns ``Q`` with ``Q[:, 0] = u / ||u||``.

    ``projected`` is ``Q^T H Q``; forming it is not part of ``counters``,
    which tally only the construction of ``Q``.
    """

    Q: np.ndarray
    method: str
    projected: np.ndarray
    status: Union[str, BreakdownReport] = 'complete'
    counters: tuple = (0, 0, 0)
    hessenberg: np.ndarray = None
    stage_counters: list = field(default_factory=list)

    @property
    def ncols(self):
        return self.Q.shape[1]

    @property
    def complete(self):
        return self.status == 'complete'


@dataclass
class LanczosResult:
    """J-orthogonal basis ``[u_1 .. u_l | v_1 .. v_l]`` of ``K_{2l}(H, u)``."""

    basis: SymplecticBasis
    projected: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    status: Union[str, BreakdownReport] = 'complete'
    counters: tuple = (0, 0, 0)
    stage_counters: list = field(default_factory=list)

    @property
    def complete(self):
        return self.status == 'complete'


def _cost(op, base):
    return tuple(a - b for a, b in zip(op.counters.snapshot(), base))


def hamiltonian_lanczos(H, u, ell, reorth='one_pass', breakdown_tol=1e-12,
                        count_mode='full'):
    """Build ``ell`` pairs of a J-orthogonal basis of ``K_{2 ell}(H, u)``.

    Returns a :class:`LanczosResult`; ``J^T S^T J u = ||u|| e_1``. A
    breakdown stops the build and is reported in ``status`` with the pairs
    completed so far.
    """
    count_mode = _check_opts(reorth, count_mode)
    if ell < 1:
        raise ValueError('need at least one pair')
    op = as_operator(H)
    u = _start(op, u)
    base = op.counters.snapshot()
    ctr = op.counters
    passes = _PASSES[reorth]
    count_reorth = count_mode == 'full'
    d = op.dim
    U = np.zeros((d, ell))
    V = np.zeros((d, ell))
    theta, alpha, beta = [], [], [0.0]
    Hv = {}
    stage_counters = []
    status = 'complete'
    k = 0

    def project(w):
        if passes and k:
            w = j_orthogonalize(w, U[:, :k], V[:, :k], passes)
            if count_reorth:
                ctr.add(dots=2 * passes * k)
        return w

    nu = norm2(u, ctr)
    if nu == 0.0:
        raise ValueError('starting vector must be nonzero')
    w = u / nu
    while True:
        Hu = op.apply(w)
        th = jdot(Hu, w, ctr)
        thr = breakdown_tol * float(np.linalg.norm(Hu))
        if abs(th) <= thr:
            status = BreakdownReport('serious', k + 1, 'theta', abs(th), thr)
            break
        U[:, k] = w
        V[:, k] = project(Hu / th)
        theta.append(th)
        k += 1
        # alpha_k, beta_k from H v_k
        Hv[k] = op.apply(V[:, k - 1])
        alpha.append(-jdot(Hv[k], V[:, k - 1], ctr))
        if k >= 2:
            beta.append(-jdot(Hv[k - 1], V[:, k - 1], ctr))
        stage_counters.append(_cost(op, base))
        if k == ell:
            break
        w = Hv[k] - alpha[k - 1] * U[:, k - 1]
        if k >= 2:
            w -= beta[k - 1] * U[:, k - 2]
        w = project(w)
        chi = norm2(w, ctr)
        thr = breakdown_tol * float(np.linalg.norm(Hv[k]))
        if chi <= thr:
            status = BreakdownReport('lucky', k + 1, '|w_u|', chi, thr)
            break
        w = w / chi
    U, V = U[:, :k], V[:, :k]
    T = np.diag(alpha[:k]) + np.diag(beta[1:k], 1) + np.diag(beta[1:k], -1)
    P = np.zeros((2 * k, 2 * k))
    P[:k, k:] = T
    P[k:, :k] = np.diag(theta)
    empty = np.zeros((d, 0))
    exhausted = 2 * k == d or (isinstance(status, BreakdownReport)
                               and status.lucky)
    basis = SymplecticBasis(empty, U, empty.copy(), V, exhausted=exhausted)
    return LanczosResult(basis=basis, projected=P, theta=np.array(theta),
                         alpha=np.array(alpha[:k]), beta=np.array(beta[:k]),
                         status=status, counters=_cost(op, base),
                         stage_counters=stage_counters)


def _gram_schmidt(Q, k, w, passes, ctr, count_extra):
    """Modified Gram-Schmidt of ``w`` against ``Q[:, :k]``, plus
    ``passes`` reorthogonalization sweeps. Returns ``(w, coefficients)``."""
    h = np.zeros(k)
    for sweep in range(1 + passes):
        for i in range(k):
            c = float(Q[:, i] @ w)
            w = w - c * Q[:, i]
            h[i] += c
        if sweep == 0 or count_extra:
            ctr.add(dots=k)
    return w, h


def _orthonormal_build(op, u, m, next_candidate, method, reorth,
                       breakdown_tol, count_mode):
    count_mode = _check_opts(reorth, count_mode)
    if m < 1:
        raise ValueError('need at least one column')
    u = _start(op, u)
    base = op.counters.snapshot()
    ctr = op.counters
    passes = _PASSES[reorth]
    extra = count_mode == 'full'
    Q = np.zeros((op.dim, m))
    Hh = np.zeros((m + 1, m))
    nu = norm2(u, ctr)
    if nu == 0.0:
        raise ValueError('starting vector must be nonzero')
    Q[:, 0] = u / nu
    stage_counters = [_cost(op, base)]
    status = 'complete'
    k = 1
    while k < m:
        w, src = next_candidate(Q, k)
        scale = norm2(w, ctr)
        w, h = _gram_schmidt(Q, k, w, passes, ctr, extra)
        nrm = norm2(w, ctr)
        if src is not None:
            Hh[:k, src] = h
            Hh[k, src] = nrm
        if nrm <= breakdown_tol * scale:
            status = BreakdownReport('lucky', k + 1, '|w|', nrm,
                                     breakdown_tol * scale)
            break
        Q[:, k] = w / nrm
        k += 1
        stage_counters.append(_cost(op, base))
    Q = Q[:, :k]
    cost = _cost(op, base)
    HQ = np.column_stack([op.apply_raw(Q[:, j]) for j in range(k)])
    return OrthonormalBasis(Q=Q, method=method, projected=Q.T @ HQ,
                            status=status, counters=cost,
                            hessenberg=Hh[:k + 1, :k] if method == 'arnoldi'
                            else None, stage_counters=stage_counters)


def arnoldi(H, u, m, reorth='one_pass', breakdown_tol=1e-12,
            count_mode='full'):
    """Orthonormal basis of ``K_m(H, u)`` by Arnoldi with modified
    Gram-Schmidt. An invariant subspace ends the build with a lucky
    breakdown."""
    op = as_operator(H)

    def candidate(Q, k):
        return op.apply(Q[:, k - 1]), k - 1

    return _orthonormal_build(op, u, m, candidate, 'arnoldi', reorth,
                              breakdown_tol, count_mode)


def eksm(H, u, m, reorth='one_pass', breakdown_tol=1e-12, count_mode='full'):
    """Orthonormal basis of the extended Krylov subspace, one vector at a
    time.

    Column 1 is ``u / ||u||``. Even columns orthogonalize ``H`` applied to
    the previous ``H``-side column, odd columns ``H^{-1}`` applied to the
    previous inverse-side column, so ``m = 2k + 1`` columns span
    ``{H^{-k} u, .., H^k u}``.
    """
    op = as_operator(H)

    def candidate(Q, k):
        j = k + 1                      # 1-based index of the new column
        src = Q[:, 0] if j <= 3 else Q[:, j - 3]
        if j % 2 == 0:
            return op.apply(src), None
        return op.apply_inverse(src), None

    return _orthonormal_build(op, u, m, candidate, 'eksm', reorth,
                              breakdown_tol, count_mode)

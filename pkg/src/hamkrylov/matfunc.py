"""Dense matrix functions for small projected matrices.

``exp`` is delegated to :func:`scipy.linalg.expm` (scaling and squaring
with a Pade approximant). ``cos`` uses a real Taylor base approximation on
a scaled argument followed by the double-angle recursion, and ``sign`` the
Newton iteration ``X <- (X + X^{-1}) / 2`` with optional determinantal
scaling.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ImaginarySpectrumError

__all__ = ['MatFunKind', 'SignInfo', 'expm_dense', 'cosm_dense',
           'signm_dense', 'apply_matfunc']


class MatFunKind(str, enum.Enum):
    EXP = 'exp'
    COS = 'cos'
    SIGN = 'sign'


def _square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError('expected a square matrix, got shape %s'
                         % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValueError('matrix has non-finite entries')
    return A


def _finite(F, name):
    if not np.all(np.isfinite(F)):
        raise FloatingPointError('%s overflowed' % name)
    return F


def expm_dense(A):
    """Matrix exponential."""
    A = _square(A)
    return _finite(scipy.linalg.expm(A), 'expm')


# Taylor terms of cos in B = X^2 used after scaling to ||X||_1 <= 1; the
# truncation error is below (1)^{2N} / (2N)! ~ 1e-24 for N = 12.
_COS_TERMS = 12


def cosm_dense(A):
    """Matrix cosine in real arithmetic.

    ``X = A / 2^k`` with ``||X||_1 <= 1``; ``cos(X)`` from its Taylor series
    in ``X^2`` (Horner form), then ``k`` steps of ``C <- 2 C^2 - I``.
    """
    A = _square(A)
    m = A.shape[0]
    eye = np.eye(m)
    nrm = np.linalg.norm(A, 1)
    k = max(0, int(math.ceil(math.log2(nrm)))) if nrm > 1 else 0
    X = A / 2.0 ** k
    B = X @ X
    coef = [(-1) ** j / math.factorial(2 * j) for j in range(_COS_TERMS + 1)]
    C = coef[-1] * eye
    for c in coef[-2::-1]:
        C = C @ B + c * eye
    with np.errstate(over='ignore', invalid='ignore'):
        for _ in range(k):
            C = 2.0 * (C @ C) - eye
    return _finite(C, 'cosm')


@dataclass
class SignInfo:
    """Convergence record of :func:`signm_dense`.

    ``steps[k]`` is ``||X_{k+1} - X_k||_F / ||X_k||_F``.
    """

    iterations: int = 0
    converged: bool = False
    steps: list = field(default_factory=list)
    scales: list = field(default_factory=list)


def signm_dense(A, scaling=True, tol=1e-13, maxiter=50, return_info=False):
    """Matrix sign function by Newton's iteration.

    ``X_0 = A``, ``X_{k+1} = (mu_k X_k + (mu_k X_k)^{-1}) / 2`` with
    ``mu_k = |det X_k|^{-1/m}`` when ``scaling`` is true and ``mu_k = 1``
    otherwise. Scaling is switched off once the relative step drops below
    ``1e-2`` so that the final phase converges quadratically. The iteration
    stops when ``||X_{k+1} - X_k||_F <= tol ||X_k||_F``.

    Raises
    ------
    ImaginarySpectrumError
        If an iterate is singular or the iteration does not converge within
        ``maxiter`` steps, both symptoms of eigenvalues on or near the
        imaginary axis.
    """
    X = _square(A)
    m = X.shape[0]
    info = SignInfo()
    scale_on = scaling
    for it in range(1, maxiter + 1):
        mu = 1.0
        if scale_on:
            sign, logdet = np.linalg.slogdet(X)
            if sign == 0 or not np.isfinite(logdet):
                raise ImaginarySpectrumError(
                    'Newton iterate %d is singular' % (it - 1))
            mu = math.exp(-logdet / m)
        Y = mu * X
        try:
            Yinv = np.linalg.inv(Y)
        except np.linalg.LinAlgError:
            raise ImaginarySpectrumError('Newton iterate %d is singular'
                                         % (it - 1)) from None
        Xn = 0.5 * (Y + Yinv)
        if not np.all(np.isfinite(Xn)):
            raise ImaginarySpectrumError('Newton iteration diverged')
        nx = np.linalg.norm(X)
        step = np.linalg.norm(Xn - X) / nx
        info.steps.append(float(step))
        info.scales.append(mu)
        if np.linalg.norm(Xn) <= 1e3 * np.finfo(float).eps * nx:
            raise ImaginarySpectrumError('Newton iterate %d is singular' % it)
        X = Xn
        info.iterations = it
        if step <= tol:
            info.converged = True
            break
        if step < 1e-2:
            scale_on = False
    if not info.converged:
        raise ImaginarySpectrumError(
            'sign iteration did not converge in %d steps; the spectrum is '
            'probably on or near the imaginary axis' % maxiter)
    return (X, info) if return_info else X


_KERNELS = {MatFunKind.EXP: expm_dense, MatFunKind.COS: cosm_dense,
            MatFunKind.SIGN: signm_dense}


def apply_matfunc(kind, A):
    """Evaluate ``f(A)`` for ``kind`` in ``{'exp', 'cos', 'sign'}``."""
    return _KERNELS[MatFunKind(kind)](A)

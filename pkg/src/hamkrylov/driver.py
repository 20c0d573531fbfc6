"""Approximation of ``f(H) u`` through a projected matrix.

With a J-orthogonal HEKS basis ``S`` the approximation is
``S f(H_S) e_{s+1} ||u||`` where ``H_S = J^T S^T J H S`` and ``u_1`` sits
in column ``s + 1``; Hamiltonian Lanczos uses ``e_1``. Orthonormal bases
(EKSM, Arnoldi) give ``Q f(Q^T H Q) e_1 ||u||``.
"""
import concurrent.futures
import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BreakdownError, HamKrylovError
from .heks import BreakdownReport, heks_build, stage_shape, tail_cost
from .jform import hamiltonian_residual
from .matfunc import MatFunKind, apply_matfunc
from .operators import DenseHamiltonian, HamiltonianOperator, as_operator
from .projection import assemble_projected_H
from .reference import arnoldi, eksm, hamiltonian_lanczos

__all__ = ['METHODS', 'ApproxResult', 'approximate', 'dense_oracle',
           'convergence_sweep', 'write_sweep_csv', 'CSV_COLUMNS']

METHODS = ('heks', 'haml', 'eksm', 'arnoldi')
STRUCTURED = ('heks', 'haml')
CSV_COLUMNS = ('method', 'function', 'columns', 'rel_error', 'matvecs',
               'solves', 'dots', 'status')


@dataclass
class ApproxResult:
    """One approximation of ``f(H) u``.

    ``status`` is ``'complete'``, ``'lucky'`` (the basis stopped early on an
    invariant subspace; ``columns`` is then the width actually used),
    ``'serious'`` (no approximation) or ``'error'`` (``f`` could not be
    evaluated on the projected matrix). ``projected_residual`` is the
    Hamiltonian residual of the projected matrix for the structured methods.
    """

    method: str
    kind: str
    columns: int
    vector: Optional[np.ndarray]
    rel_error: Optional[float]
    counters: tuple
    status: str = 'complete'
    projected_residual: Optional[float] = None
    message: str = ''


def _check_method(method):
    if method not in METHODS:
        raise ValueError('unknown method %r; choose from %s'
                         % (method, METHODS))
    return method


def _dense_matrix(H):
    if isinstance(H, HamiltonianOperator):
        return H.toarray()
    if isinstance(H, DenseHamiltonian):
        return H.matrix
    if hasattr(H, 'toarray'):
        return H.toarray()
    return np.asarray(H, dtype=float)


def dense_oracle(kind, H, u):
    """``f(H) u`` with ``f(H)`` evaluated densely."""
    return apply_matfunc(kind, _dense_matrix(H)) @ np.asarray(u, dtype=float)


class _Built:
    """A basis built once at its largest width, evaluated at any prefix.

    ``prefix(width)`` returns ``(basis, projected, start_index, cost)`` for
    a width the method supports; cost is that of a standalone run.
    """

    def __init__(self, method, op, u1, m, reorth, breakdown_tol, count_mode):
        self.method = method
        self.count_mode = count_mode
        self.status = 'complete'
        self.report = None
        if method == 'heks':
            res = heks_build(op, u1, target_columns=m, reorth=reorth,
                             breakdown_tol=breakdown_tol,
                             count_mode=count_mode)
            self.res = res
            self.width = res.basis.ncols
            self.final_cost = res.counters
        elif method == 'haml':
            res = hamiltonian_lanczos(op, u1, m // 2, reorth=reorth,
                                      breakdown_tol=breakdown_tol,
                                      count_mode=count_mode)
            self.res = res
            self.width = res.basis.ncols
            self.final_cost = res.counters
        else:
            build = eksm if method == 'eksm' else arnoldi
            res = build(op, u1, m, reorth=reorth, breakdown_tol=breakdown_tol,
                        count_mode=count_mode)
            self.res = res
            self.width = res.ncols
            self.final_cost = res.counters
        if isinstance(res.status, BreakdownReport):
            self.report = res.status
            self.status = res.status.kind

    def supports(self, width):
        return width % 2 == 0 if self.method in STRUCTURED else width >= 1

    def prefix(self, width):
        res = self.res
        if self.method == 'heks':
            stage = width // 2
            r, s = stage_shape(stage)
            if stage == res.basis.stage:
                cost = res.counters
            else:
                cost = tuple(a + b for a, b in zip(
                    res.stage_counters[stage - 1],
                    tail_cost(r, s, self.count_mode)))
            return (res.basis.matrix(r, s),
                    assemble_projected_H(res.coeffs, r, s), s, cost)
        if self.method == 'haml':
            k = width // 2
            ell = res.basis.r
            P = res.projected
            idx = np.r_[0:k, ell:ell + k]
            S = np.hstack([res.basis.U[:, :k], res.basis.V[:, :k]])
            return S, P[np.ix_(idx, idx)], 0, res.stage_counters[k - 1]
        cost = (res.counters if width == self.width
                else res.stage_counters[width - 1])
        return (res.Q[:, :width], res.projected[:width, :width], 0, cost)


_EVAL_ERRORS = (HamKrylovError, ArithmeticError, np.linalg.LinAlgError)


class _Undefined:
    """Stands in for a dense reference that could not be computed."""

    def __init__(self, reason):
        self.reason = reason


def _evaluate(built, kind, width, unorm, reference):
    S, P, start, cost = built.prefix(width)
    status = 'complete'
    if width == built.width and built.status == 'lucky':
        status = 'lucky'
    hres = None
    if built.method in STRUCTURED:
        hres = hamiltonian_residual(P)
    if isinstance(reference, _Undefined):
        return ApproxResult(built.method, MatFunKind(kind).value, width, None,
                            None, cost, 'error', hres,
                            'reference undefined: %s' % reference.reason)
    try:
        F = apply_matfunc(kind, P)
    except _EVAL_ERRORS as exc:
        return ApproxResult(built.method, MatFunKind(kind).value, width, None,
                            None, cost, 'error', hres, str(exc))
    y = S @ (F[:, start] * unorm)
    err = None
    if reference is not None:
        err = float(np.linalg.norm(y - reference) / np.linalg.norm(reference))
    return ApproxResult(built.method, MatFunKind(kind).value, width, y, err,
                        cost, status, hres)


def _prepare(H, u):
    op = as_operator(H)
    u = np.asarray(u, dtype=float)
    unorm = float(np.linalg.norm(u))
    if unorm == 0.0:
        raise ValueError('starting vector must be nonzero')
    return op, u / unorm, unorm


def approximate(method, kind, H, u, m, reorth='one_pass', breakdown_tol=1e-12,
                count_mode='full', reference=None):
    """Approximate ``f(H) u`` from an ``m``-column basis.

    Parameters
    ----------
    method : {'heks', 'haml', 'eksm', 'arnoldi'}
    kind : {'exp', 'cos', 'sign'}
    H : operator, DenseHamiltonian or array
    u : ndarray
    m : int
        Basis width, at most ``2n``; even for ``'heks'`` and ``'haml'``.
    reference : ndarray, optional
        Exact ``f(H) u``; when given, ``rel_error`` is filled in.

    Raises
    ------
    BreakdownError
        On a serious breakdown before ``m`` columns.
    """
    _check_method(method)
    MatFunKind(kind)
    op, u1, unorm = _prepare(H, u)
    if not 1 <= m <= op.dim:
        raise ValueError('need 1 <= m <= 2n = %d, got %d' % (op.dim, m))
    if method in STRUCTURED and m % 2:
        raise ValueError('%s needs an even number of columns' % method)
    built = _Built(method, op, u1, m, reorth, breakdown_tol, count_mode)
    if built.status == 'serious':
        raise BreakdownError(str(built.report), built.report)
    if built.width == 0:
        raise BreakdownError('no columns were built', built.report)
    return _evaluate(built, kind, built.width, unorm, reference)


def _widths(m_max, stride):
    return [w for w in range(stride, m_max + 1, stride)]


def _sweep_method(method, kinds, op, u1, unorm, widths, refs, reorth,
                  breakdown_tol, count_mode):
    rows = []
    top = max((w for w in widths if method not in STRUCTURED or w % 2 == 0),
              default=0)
    if top == 0:
        return rows
    built = _Built(method, op.with_counters(), u1, top, reorth,
                   breakdown_tol, count_mode)
    for kind in kinds:
        for w in widths:
            if not built.supports(w):
                continue
            if w <= built.width:
                rows.append(_evaluate(built, kind, w, unorm, refs[kind]))
                continue
            if built.status == 'lucky':
                # the invariant subspace already gives the final answer
                res = _evaluate(built, kind, built.width, unorm, refs[kind])
                res.status = 'lucky'
                rows.append(res)
            else:
                rows.append(ApproxResult(method, MatFunKind(kind).value,
                                         built.width, None, None,
                                         built.final_cost, 'serious', None,
                                         str(built.report)))
    return rows


def convergence_sweep(methods, kinds, H, u, m_max, stride=2, reorth='one_pass',
                      breakdown_tol=1e-12, count_mode='full', jobs=1,
                      references=None):
    """Relative errors of every method and function over basis widths
    ``stride, 2 stride, .., <= m_max``.

    Each method builds its basis once at the largest width and evaluates
    every prefix; counters in a row are those of a standalone build of that
    width. Structured methods are evaluated at even widths only. Breakdowns
    are recorded per row and never abort the sweep; so is a function whose
    dense reference cannot be computed (status ``'error'``). With ``jobs > 1``
    methods run in threads, each with its own counters; row order is the
    same as in a serial run.
    """
    methods = [_check_method(mt) for mt in methods]
    kinds = [MatFunKind(k).value for k in kinds]
    if not methods or not kinds:
        return []
    op, u1, unorm = _prepare(H, u)
    if m_max > op.dim:
        raise ValueError('m_max = %d exceeds 2n = %d' % (m_max, op.dim))
    if stride < 1:
        raise ValueError('stride must be positive')
    widths = _widths(m_max, stride)
    refs = dict(references or {})
    for k in kinds:
        if k not in refs:
            try:
                refs[k] = dense_oracle(k, op, u1 * unorm)
            except _EVAL_ERRORS as exc:
                # e.g. sign on an imaginary spectrum, cos overflowing
                refs[k] = _Undefined(str(exc))
    args = (kinds, op, u1, unorm, widths, refs, reorth, breakdown_tol,
            count_mode)
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda mt: _sweep_method(mt, *args),
                                  methods))
    else:
        parts = [_sweep_method(mt, *args) for mt in methods]
    return [row for part in parts for row in part]


def _fmt(x):
    return '' if x is None else '%.17g' % x


def write_sweep_csv(rows, path=None):
    """Write sweep rows with the header ``method,function,columns,rel_error,
    matvecs,solves,dots,status``; returns the CSV text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(CSV_COLUMNS)
    for r in rows:
        mv, sv, dt = r.counters
        w.writerow([r.method, r.kind, r.columns, _fmt(r.rel_error), mv, sv,
                    dt, r.status])
    text = buf.getvalue()
    if path is not None:
        with open(path, 'w', newline='') as fh:
            fh.write(text)
    return text

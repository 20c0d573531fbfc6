"""Short-recurrence construction of a J-orthogonal basis of the Hamiltonian
extended Krylov subspace

    K_{2r}(H, u) + K_{2s}(H^{-1}, H^{-1} u),    r = s or r = s + 1.

The basis is ``S = [y_s .. y_1, u_1 .. u_r | x_s .. x_1, v_1 .. v_r]`` with
``S^T J S = J``. Stages alternate: an odd stage appends the forward pair
``(u_{k+1}, v_{k+1})``, an even stage the inverse pair
``(x_{k+1}, y_{k+1})``. Each vector is obtained from at most five earlier
ones; the scalars of the recurrence determine both projected matrices
``J^T S^T J H S`` and ``J^T S^T J H^{-1} S`` (see
:mod:`hamkrylov.projection`).
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, StructureError
from .jform import j_orthogonalize, jdot, jmul, norm2
from .operators import OpCounters, as_operator

__all__ = ['BuildOptions', 'BreakdownReport', 'SymplecticBasis',
           'HeksCoefficients', 'HeksResult', 'HeksBuilder', 'heks_build',
           'stage_shape', 'tail_cost', 'normalize_count_mode']

log = logging.getLogger(__name__)

REORTH_POLICIES = ('none', 'one_pass', 'two_pass')
COUNT_MODES = ('full', 'recurrence')
# accepted spelling kept for command lines written against older tooling
_COUNT_ALIASES = {'paper': 'recurrence'}


def normalize_count_mode(mode):
    """Canonical counter mode name; raises ``ValueError`` if unknown."""
    mode = _COUNT_ALIASES.get(mode, mode)
    if mode not in COUNT_MODES:
        raise ValueError('count_mode must be one of %s' % (COUNT_MODES,))
    return mode


def stage_shape(stage):
    """``(r, s)`` of the basis ``S_stage`` (``2 * stage`` columns)."""
    return (stage + 1) // 2, stage // 2


def tail_cost(r, s, count_mode='full'):
    """``(matvecs, solves, dots)`` that finalizing an ``(r, s)`` basis adds.

    The forward tail needs ``H v_r`` and up to four scalar products; the
    inverse tail (not tallied in ``'recurrence'`` mode) needs ``H^{-1} y_s``,
    ``H^{-1} u_r`` when ``r = s + 1``, and one scalar product per ``f_jj``,
    ``j >= 2``.
    """
    if r == 0:
        return (0, 0, 0)
    dots = 1 + (r >= 2) * 2 + (r <= s)
    solves = 0
    if normalize_count_mode(count_mode) == 'full':
        dots += r - 1
        if s == 0:
            solves, dots = 1, dots + 1
        else:
            solves = 1 + (r == s + 1)
            dots += 2 + (s >= 2) + (r == s + 1)
    return (1, solves, int(dots))


@dataclass
class BuildOptions:
    """Knobs of :func:`heks_build`.

    Attributes
    ----------
    target_columns : int
        Requested basis width ``2 * l``; must be even and at least 2.
    breakdown_tol : float
        Relative threshold for vanishing continuation vectors and
        normalization scalars.
    reorth : {'none', 'one_pass', 'two_pass'}
        Re-J-orthogonalization of every new vector against all previous
        columns.
    validate_each_stage : bool
        Record ``||S^T J S - J||_F`` after every stage in
        ``HeksResult.stage_residuals``.
    count_mode : {'full', 'recurrence'}
        ``'recurrence'`` tallies only the operations of the bare short recurrence
        (no re-orthogonalization dots, no extra work for the inverse
        projection tail); ``'full'`` tallies everything.
    """

    target_columns: int
    breakdown_tol: float = 1e-12
    reorth: str = 'one_pass'
    validate_each_stage: bool = False
    count_mode: str = 'full'

    def __post_init__(self):
        if self.target_columns < 2 or self.target_columns % 2:
            raise ValueError('target_columns must be even and >= 2, got %r'
                             % self.target_columns)
        if self.reorth not in REORTH_POLICIES:
            raise ValueError('reorth must be one of %s' % (REORTH_POLICIES,))
        self.count_mode = normalize_count_mode(self.count_mode)
        if not self.breakdown_tol > 0:
            raise ValueError('breakdown_tol must be positive')


@dataclass
class BreakdownReport:
    """Why a build stopped early.

    ``kind`` is ``'lucky'`` when a continuation vector vanished (the range is
    invariant) and ``'serious'`` when a normalization scalar vanished.
    ``stage`` is the index of the stage that could not be completed.
    """

    kind: str
    stage: int
    scalar_name: str
    magnitude: float
    threshold: float

    @property
    def lucky(self):
        return self.kind == 'lucky'

    def __str__(self):
        return ('%s breakdown at stage %d: %s = %.3e (threshold %.3e)'
                % (self.kind, self.stage, self.scalar_name, self.magnitude,
                   self.threshold))


@dataclass
class SymplecticBasis:
    """Columns of a HEKS basis, stored per block in generation order.

    ``Y[:, j-1]`` is ``y_j`` (likewise ``U``, ``X``, ``V``). The assembled
    matrix in the documented column order is returned by :meth:`matrix`.
    """

    Y: np.ndarray
    U: np.ndarray
    X: np.ndarray
    V: np.ndarray
    exhausted: bool = False

    @property
    def n(self):
        return self.U.shape[0] // 2

    @property
    def r(self):
        return self.U.shape[1]

    @property
    def s(self):
        return self.Y.shape[1]

    @property
    def stage(self):
        return self.r + self.s

    @property
    def ncols(self):
        return 2 * (self.r + self.s)

    def matrix(self, r=None, s=None):
        """``[y_s .. y_1, u_1 .. u_r | x_s .. x_1, v_1 .. v_r]``.

        Smaller ``r``, ``s`` give the basis of an earlier stage.
        """
        r = self.r if r is None else r
        s = self.s if s is None else s
        if r > self.r or s > self.s:
            raise ValueError('requested (r, s) = (%d, %d) exceeds the stored '
                             '(%d, %d)' % (r, s, self.r, self.s))
        return np.hstack([self.Y[:, :s][:, ::-1], self.U[:, :r],
                          self.X[:, :s][:, ::-1], self.V[:, :r]])

    def stage_matrix(self, stage):
        return self.matrix(*stage_shape(stage))

    @property
    def S(self):
        return self.matrix()

    def start_index(self, s=None):
        """0-based column of ``u_1`` in :meth:`matrix` (``e_{s+1}``)."""
        return self.s if s is None else s


def _arr(values):
    return np.array(values, dtype=float)


@dataclass
class HeksCoefficients:
    """Scalars of the HEKS recurrences (1-based names, 0-based storage).

    ``delta[j-1] = y_j^T J H y_j``, ``lam[j-1] = -x_j^T J H x_j``,
    ``theta[j-1] = u_j^T J H u_j``, ``alpha[j-1] = -v_j^T J H v_j``,
    ``gamma[j-1] = -x_j^T J H v_j``. ``beta`` and ``mu`` are indexed the same
    way; ``beta[0]`` and ``mu[0]`` are unused zeros. For the inverse
    projection ``e_diag[j-1] = e_jj``, ``e_off[j-1] = e_{j,j+1}``,
    ``f[j-1] = f_jj``, ``g_diag[j-1] = g_jj``, ``g_off[j-1] = g_{j,j+1}``.
    ``chi`` and ``psi`` hold the norms of the unnormalized ``u`` and ``x``
    candidates.
    """

    delta: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    mu: np.ndarray
    e_diag: np.ndarray
    e_off: np.ndarray
    f: np.ndarray
    g_diag: np.ndarray
    g_off: np.ndarray
    chi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    psi: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def r(self):
        return len(self.theta)

    @property
    def s(self):
        return len(self.delta)

    def as_dict(self):
        return {k: np.asarray(v) for k, v in self.__dict__.items()}


@dataclass
class HeksResult:
    basis: SymplecticBasis
    coeffs: HeksCoefficients
    status: Union[str, BreakdownReport]
    counters: tuple
    stage_counters: list = field(default_factory=list)
    stage_residuals: list = field(default_factory=list)

    @property
    def complete(self):
        return self.status == 'complete'

    @property
    def breakdown(self) -> Optional[BreakdownReport]:
        return None if self.complete else self.status


class _Breakdown(Exception):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class HeksBuilder:
    """Stateful HEKS recurrence; call :meth:`extend` once per stage.

    The builder is strictly sequential. Distinct builders may share one
    read-only operator as long as each owns its counters.
    """

    def __init__(self, H, u1, opts):
        self.op = as_operator(H)
        self.opts = opts
        u1 = np.asarray(u1, dtype=float)
        if u1.shape != (self.op.dim,):
            raise DimensionError('starting vector has shape %s, operator '
                                 'dimension is %d' % (u1.shape, self.op.dim))
        self._u0 = u1
        self.counters = self.op.counters
        self._base = self.counters.snapshot()
        self._bare = opts.count_mode == 'recurrence'
        cap = opts.target_columns // 4 + 2
        d = self.op.dim
        self._Y = np.zeros((d, cap))
        self._U = np.zeros((d, cap))
        self._X = np.zeros((d, cap))
        self._V = np.zeros((d, cap))
        self.r = 0
        self.s = 0
        # scalars; lists hold values for j = 1, 2, ...
        self.theta, self.alpha, self.beta, self.gamma, self.mu = \
            [], [], [0.0], [], [0.0]
        self.delta, self.lam, self.xi = [], [], []
        self.chi, self.psi = [], []
        self.e_diag, self.e_off, self.g_diag, self.g_off = [], [], [], []
        self.f11 = None
        self._tail = {}
        # cached operator images
        self._Hv = {}      # j -> H v_j
        self._Hinv_u = {}  # j -> H^{-1} u_j
        self._Hinv_y = {}  # j -> H^{-1} y_j
        self.stage_counters = []
        self.stage_residuals = []

    # ----------------------------------------------------------- helpers
    def _jd(self, x, y):
        return jdot(x, y, self.counters)

    def _nrm(self, x):
        return norm2(x, self.counters)

    # Work outside the bare recurrence is not tallied in 'recurrence' mode.
    def _solve_extra(self, v):
        if self._bare:
            return self.op.apply_inverse_raw(v)
        return self.op.apply_inverse(v)

    def _jd_extra(self, x, y):
        return jdot(x, y, None if self._bare else self.counters)

    def _blocks(self):
        r, s = self.r, self.s
        P1 = np.hstack([self._Y[:, :s], self._U[:, :r]])
        P2 = np.hstack([self._X[:, :s], self._V[:, :r]])
        return P1, P2

    def _reorth(self, w, passes=None):
        """``w <- w - S J^T S^T J w`` against the current columns."""
        if passes is None:
            passes = {'none': 0, 'one_pass': 1, 'two_pass': 2}[
                self.opts.reorth]
        if passes == 0 or self.r + self.s == 0:
            return w
        P1, P2 = self._blocks()
        w = j_orthogonalize(w, P1, P2, passes)
        if not self._bare:
            self.counters.add(dots=2 * passes * P1.shape[1])
        return w

    def _threshold(self, ref):
        return self.opts.breakdown_tol * float(np.linalg.norm(ref))

    def _grow(self):
        if max(self.r, self.s) + 1 >= self._U.shape[1]:
            for name in ('_Y', '_U', '_X', '_V'):
                old = getattr(self, name)
                new = np.zeros((old.shape[0], 2 * old.shape[1]))
                new[:, :old.shape[1]] = old
                setattr(self, name, new)

    def u(self, j):
        return self._U[:, j - 1]

    def v(self, j):
        return self._V[:, j - 1]

    def x(self, j):
        return self._X[:, j - 1]

    def y(self, j):
        return self._Y[:, j - 1]

    @property
    def stage(self):
        return self.r + self.s

    def cost(self):
        """``(matvecs, solves, dots)`` spent by this builder so far."""
        return tuple(a - b for a, b in zip(self.counters.snapshot(),
                                           self._base))

    # ------------------------------------------------------------ stages
    def extend(self):
        """Run the next stage; raises ``_Breakdown`` on failure."""
        self._grow()
        if self.stage % 2 == 0:
            self.extend_forward()
        else:
            self.extend_inverse()
        self.stage_counters.append(self.cost())
        if self.opts.validate_each_stage:
            from .jform import symplectic_residual
            self.stage_residuals.append(symplectic_residual(
                np.hstack(self._blocks())[:, self._order()]))

    def _order(self):
        # map [Y U | X V] natural order to the documented column order
        r, s = self.r, self.s
        m = r + s
        first = list(range(s - 1, -1, -1)) + list(range(s, m))
        return first + [m + i for i in first]

    def extend_forward(self):
        """Stage ``2k+1``: append ``u_{k+1}``, ``v_{k+1}``."""
        k = self.r
        stage = self.stage + 1
        op = self.op
        if k == 0:
            nu = self._nrm(self._u0)
            if nu == 0.0:
                raise ValueError('starting vector must be nonzero')
            w = self._u0 / nu
            ref = w
        else:
            if k > self.s:
                raise RuntimeError('forward stage needs r == s')
            Hv = op.apply(self.v(k))
            self._Hv[k] = Hv
            self._forward_coeffs(k, Hv)
            w = Hv - self.gamma[k - 1] * self.y(k) - self.alpha[k - 1] * self.u(k)
            if k >= 2:
                w -= self.mu[k - 1] * self.y(k - 1) + self.beta[k - 1] * self.u(k - 1)
            ref = Hv
            w = self._reorth(w)
            chi = self._nrm(w)
            thr = self._threshold(ref)
            if chi <= thr:
                raise _Breakdown(BreakdownReport('lucky', stage, '|w_u|', chi,
                                                 thr))
            w = w / chi
            self.chi.append(chi)
        u = w
        Hu = op.apply(u)
        theta = self._jd(Hu, u)
        thr = self._threshold(Hu)
        if abs(theta) <= thr:
            raise _Breakdown(BreakdownReport('serious', stage, 'theta',
                                             abs(theta), thr))
        v = self._reorth(Hu / theta)
        self._U[:, k] = u
        self._V[:, k] = v
        self.theta.append(theta)
        self.r += 1

    def _forward_coeffs(self, k, Hv):
        """alpha_k, beta_k, gamma_k, mu_k from ``H v_k``."""
        vk = self.v(k)
        self.alpha.append(-self._jd(Hv, vk))
        if k >= 2:
            # beta_k = -v_k^T J H v_{k-1}
            self.beta.append(-self._jd(self._Hv[k - 1], vk))
        if k <= self.s:
            self.gamma.append(-self._jd(Hv, self.x(k)))
        if k >= 2:
            self.mu.append(-self._jd(Hv, self.x(k - 1)))

    def extend_inverse(self):
        """Stage ``2k+2``: append ``x_{k+1}``, ``y_{k+1}``."""
        k = self.s
        stage = self.stage + 1
        op = self.op
        if self.r != k + 1:
            raise RuntimeError('inverse stage needs r == s + 1')
        if k == 0:
            Hiu = op.apply_inverse(self.u(1))
            self._Hinv_u[1] = Hiu
            self.f11 = self._jd(Hiu, self.u(1))
            w = Hiu - self.f11 * self.v(1)
            ref = Hiu
        else:
            Hiy = op.apply_inverse(self.y(k))
            self._Hinv_y[k] = Hiy
            Hiu = op.apply_inverse(self.u(k + 1))
            self._Hinv_u[k + 1] = Hiu
            yk = self.y(k)
            self.g_diag.append(self._jd(self._Hinv_u[k], yk))
            self.g_off.append(self._jd(Hiu, yk))
            self.e_diag.append(self._jd(Hiy, yk))
            if k >= 2:
                # e_{k-1,k} = y_k^T J H^{-1} y_{k-1}
                self.e_off.append(self._jd(self._Hinv_y[k - 1], yk))
            w = (Hiy - self.e_diag[k - 1] * self.x(k)
                 - self.g_diag[k - 1] * self.v(k) - self.g_off[k - 1] * self.v(k + 1))
            if k >= 2:
                w -= self.e_off[k - 2] * self.x(k - 1)
            ref = Hiy
        w = self._reorth(w)
        psi = self._nrm(w)
        thr = self._threshold(ref)
        if psi <= thr:
            raise _Breakdown(BreakdownReport('lucky', stage, '|w_x|', psi, thr))
        x = w / psi
        z = op.apply_inverse(x)
        xi = self._jd(x, z)
        thr = self._threshold(z)
        if abs(xi) <= thr:
            raise _Breakdown(BreakdownReport('serious', stage, 'xi', abs(xi),
                                             thr))
        y = self._reorth(z / xi)
        pairing = float(y @ jmul(x))
        if abs(pairing - 1.0) > 1e-8:
            raise StructureError('lost x/y pairing at stage %d: y^T J x = %r'
                                 % (stage, pairing))
        self._X[:, k] = x
        self._Y[:, k] = y
        self.psi.append(psi)
        self.xi.append(xi)
        self.lam.append(-self._jd(op.apply(x), x))
        self.delta.append(self._jd(op.apply(y), y))
        self.s += 1

    # --------------------------------------------------------------- tail
    def finalize(self):
        """Compute the scalars that the last stage left open."""
        r, s, op = self.r, self.s, self.op
        if r == 0:
            return self._coefficients()
        # forward tail: alpha_r, beta_r, gamma_r (if x_r exists), mu_r
        if len(self.alpha) < r:
            Hv = op.apply(self.v(r))
            self._Hv[r] = Hv
            self._forward_coeffs(r, Hv)
        # inverse tail
        if s == 0:
            if self.f11 is None:
                Hiu = self._solve_extra(self.u(1))
                self._Hinv_u[1] = Hiu
                self.f11 = self._jd_extra(Hiu, self.u(1))
        elif len(self.e_diag) < s:
            ys = self.y(s)
            Hiy = self._solve_extra(ys)
            self._Hinv_y[s] = Hiy
            self.g_diag.append(self._jd_extra(self._Hinv_u[s], ys))
            self.e_diag.append(self._jd_extra(Hiy, ys))
            if s >= 2:
                self.e_off.append(self._jd_extra(self._Hinv_y[s - 1], ys))
            if r == s + 1:
                Hiu = self._solve_extra(self.u(r))
                self._Hinv_u[r] = Hiu
                self.g_off.append(self._jd_extra(Hiu, ys))
        return self._coefficients()

    def _f_diag(self):
        # f_11 belongs to the recurrence; the rest reuse the cached H^{-1} u_j
        if 'f' not in self._tail:
            self._tail['f'] = [self.f11] + [
                self._jd_extra(self._Hinv_u[j], self.u(j))
                for j in range(2, self.r + 1)]
        return self._tail['f']

    def _coefficients(self):
        r = self.r
        return HeksCoefficients(
            delta=_arr(self.delta), lam=_arr(self.lam),
            theta=_arr(self.theta), alpha=_arr(self.alpha[:r]),
            beta=_arr(self.beta[:max(r, 1)]), gamma=_arr(self.gamma),
            mu=_arr(self.mu[:max(r, 1)]),
            e_diag=_arr(self.e_diag), e_off=_arr(self.e_off),
            f=_arr(self._f_diag() if r else []),
            g_diag=_arr(self.g_diag), g_off=_arr(self.g_off),
            chi=_arr(self.chi), psi=_arr(self.psi))

    def basis(self, exhausted=False):
        r, s = self.r, self.s
        return SymplecticBasis(self._Y[:, :s].copy(), self._U[:, :r].copy(),
                               self._X[:, :s].copy(), self._V[:, :r].copy(),
                               exhausted=exhausted)


def heks_build(H, u1, opts=None, **kwargs):
    """Build a J-orthogonal basis of ``K_{2r}(H,u1) + K_{2s}(H^{-1},H^{-1}u1)``.

    Parameters
    ----------
    H : HamiltonianOperator, DenseHamiltonian or array
        Nonsingular Hamiltonian matrix.
    u1 : ndarray
        Starting vector; it is normalized internally.
    opts : BuildOptions, optional
        Alternatively pass the fields of :class:`BuildOptions` as keyword
        arguments.

    Returns
    -------
    HeksResult
        ``status`` is ``'complete'`` or a :class:`BreakdownReport`. After a
        breakdown the basis of the last completed stage is returned and its
        coefficients are finalized.
    """
    if opts is None:
        opts = BuildOptions(**kwargs)
    elif kwargs:
        raise TypeError('pass either opts or keyword options, not both')
    b = HeksBuilder(H, u1, opts)
    nstages = opts.target_columns // 2
    status = 'complete'
    while b.stage < nstages:
        try:
            b.extend()
        except _Breakdown as exc:
            status = exc.report
            log.info('HEKS stopped: %s', exc.report)
            break
    coeffs = b.finalize()
    exhausted = (b.stage * 2 == b.op.dim or
                 (isinstance(status, BreakdownReport) and status.lucky))
    return HeksResult(basis=b.basis(exhausted=exhausted), coeffs=coeffs,
                      status=status, counters=b.cost(),
                      stage_counters=b.stage_counters,
                      stage_residuals=b.stage_residuals)

"""Seeded self-check suites run by ``hamkrylov check``.

Every check returns a :class:`CheckResult`; nothing raises on failure. The
``inject`` hook corrupts a known quantity so that the suites can be shown to
detect it (``'beta-sign'`` flips the off-diagonal of the tridiagonal block
before the projection is assembled).
"""
from dataclasses import dataclass

import numpy as np

from .driver import METHODS, approximate, dense_oracle
from .generators import gen_diag_logspace, gen_jk_spd, gen_real_spectrum
from .heks import heks_build
from .jform import (hamiltonian_residual, jdot, jmul, skew_hamiltonian_residual,
                    symplectic_residual)
from .matfunc import cosm_dense, expm_dense, signm_dense
from .operators import HamiltonianOperator, OpCounters, solve_hamiltonian
from .projection import (assemble_projected_H, inverse_block_residual,
                         recurrence_residual, zero_pattern_report)
from .reference import arnoldi, eksm, hamiltonian_lanczos

__all__ = ['CheckResult', 'SUITES', 'run_checks']

INJECTIONS = ('beta-sign',)
SUITE_ALIASES = {'theorem1': 'full-reduction'}


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ''

    def line(self):
        return '%s  %-14s %-38s %s' % ('PASS' if self.passed else 'FAIL',
                                      self.suite, self.name, self.detail)


def _res(suite, name, value, limit):
    return CheckResult(suite, name, bool(value <= limit),
                       '%.3e <= %.1e' % (value, limit))


def _inject(coeffs, inject):
    if inject == 'beta-sign':
        coeffs.beta = coeffs.beta.copy()
        coeffs.beta[1:] *= -1.0
    return coeffs


def suite_core(n, seed, inject=None):
    rng = np.random.default_rng(seed)
    out = []
    v = rng.standard_normal(2 * n)
    w = rng.standard_normal(2 * n)
    out.append(_res('core', 'jmul twice is -I',
                    np.linalg.norm(jmul(jmul(v)) + v), 0.0))
    out.append(_res('core', 'jdot skew symmetric',
                    abs(jdot(v, w) + jdot(w, v)), 1e-12 * np.dot(v, v)))
    H = gen_jk_spd(n, seed)
    out.append(_res('core', 'jk-spd is Hamiltonian',
                    hamiltonian_residual(H.matrix), 1e-12 * np.linalg.norm(H.matrix)))
    x = solve_hamiltonian(H, H.matrix @ v)
    out.append(_res('core', 'solve round trip',
                    np.linalg.norm(x - v) / np.linalg.norm(v), 1e-10))
    W = rng.standard_normal((2 * n, 100))
    worst = max(float(W[:, i] @ jmul(H.matrix @ W[:, i])) for i in range(100))
    out.append(CheckResult('core', 'jk-spd definite skew form', worst < 0,
                           'max w^T J H w = %.3e' % worst))
    return out


def _heks_checks(suite, H, u, cols, inject):
    out = []
    res = heks_build(H, u, target_columns=cols)
    b, c = res.basis, _inject(res.coeffs, inject)
    hn = float(np.linalg.norm(H.matrix))
    out.append(_res(suite, 'symplectic residual', symplectic_residual(b.S),
                    1e-8))
    worst_h = worst_hi = 0.0
    for st in range(1, b.stage + 1):
        rep = zero_pattern_report(H, b, c, stage=st)
        repi = zero_pattern_report(H, b, c, stage=st, inverse=True)
        worst_h = max(worst_h, rep.max_mismatch)
        worst_hi = max(worst_hi, repi.max_mismatch)
    out.append(_res(suite, 'zero pattern of H projection', worst_h, 1e-8 * hn))
    out.append(_res(suite, 'zero pattern of H^-1 projection', worst_hi,
                    1e-8 * hn))
    last = b.stage if b.exhausted else b.stage - 2
    worst = 0.0
    for st in range(1, last + 1):
        rr = recurrence_residual(H, b, c, stage=st)
        worst = max(worst, rr['forward'], rr['inverse'])
    out.append(_res(suite, 'recurrence residuals', worst, 1e-8))
    return out, res


def suite_heks(n, seed, inject=None):
    H = gen_jk_spd(n, seed)
    u = np.random.default_rng(seed + 1).standard_normal(2 * n)
    cols = 2 * min(n, 10)
    out, res = _heks_checks('heks', H, u, cols, inject)
    c = res.coeffs
    signs = (np.all(c.theta < 0) and np.all(c.delta < 0)
             and np.all(c.alpha > 0) and np.all(c.lam > 0))
    out.append(CheckResult('heks', 'definite-case coefficient signs',
                           bool(signs)))
    op = HamiltonianOperator.from_dense(H, counters=OpCounters())
    r = heks_build(op, u, target_columns=min(2 * n, 24), reorth='none',
                   count_mode='recurrence')
    deltas = {tuple(b - a for a, b in zip(r.stage_counters[i - 2],
                                          r.stage_counters[i]))
              for i in range(5, len(r.stage_counters), 2)}
    out.append(CheckResult('heks', 'loop cost per two stages',
                           deltas <= {(4, 3, 14)}, 'observed %s' % sorted(deltas)))
    return out


def suite_full_reduction(n, seed, inject=None):
    H = gen_jk_spd(n, seed)
    u = np.random.default_rng(seed + 1).standard_normal(2 * n)
    out, res = _heks_checks('full-reduction', H, u, 2 * n, inject)
    S = res.basis.S
    out.append(CheckResult('full-reduction', 'basis is square',
                           S.shape[0] == S.shape[1], 'shape %s' % (S.shape,)))
    c = _inject(res.coeffs, None)
    out.append(_res('full-reduction', 'inverse block identity',
                    inverse_block_residual(c), 1e-8))
    return out


def suite_reference(n, seed, inject=None):
    H = gen_jk_spd(n, seed)
    u = np.random.default_rng(seed + 1).standard_normal(2 * n)
    m = min(2 * n, 12)
    out = []
    L = hamiltonian_lanczos(H, u, m // 2)
    out.append(_res('reference', 'lanczos J-orthogonality',
                    symplectic_residual(L.basis.S), 1e-8))
    out.append(_res('reference', 'lanczos projection Hamiltonian',
                    hamiltonian_residual(L.projected), 1e-8))
    for name, build in (('eksm', eksm), ('arnoldi', arnoldi)):
        Q = build(H, u, m).Q
        out.append(_res('reference', '%s orthonormality' % name,
                        np.linalg.norm(Q.T @ Q - np.eye(Q.shape[1])), 1e-8))
    return out


def suite_matfunc(n, seed, inject=None):
    out = []
    H = gen_jk_spd(n, seed)
    u = np.random.default_rng(seed + 1).standard_normal(2 * n)
    res = heks_build(H, u, target_columns=min(2 * n, 12))
    P = assemble_projected_H(_inject(res.coeffs, inject))
    E = expm_dense(P)
    m = P.shape[0] // 2
    out.append(_res('matfunc', 'expm of projection symplectic',
                    symplectic_residual(E) if m else 0.0,
                    1e-10 * np.linalg.norm(E) ** 2))
    C = cosm_dense(P)
    out.append(_res('matfunc', 'cosm of projection skew-Hamiltonian',
                    skew_hamiltonian_residual(C, relative=True), 1e-10))
    G = gen_real_spectrum(min(n, 8), seed)
    Sg = signm_dense(G.matrix)
    out.append(_res('matfunc', 'signm squares to I',
                    np.linalg.norm(Sg @ Sg - np.eye(Sg.shape[0])), 1e-8))
    out.append(_res('matfunc', 'signm Hamiltonian',
                    hamiltonian_residual(Sg), 1e-8 * np.linalg.norm(Sg)))
    return out


def suite_driver(n, seed, inject=None):
    out = []
    n = min(n, 8)
    problems = [('diag', gen_diag_logspace(n, 0.1, 1.0), np.ones(2 * n),
                 ('exp', 'cos', 'sign')),
                ('jk-spd', gen_jk_spd(n, seed),
                 np.random.default_rng(seed + 1).standard_normal(2 * n),
                 ('exp', 'cos'))]
    for label, H, u, kinds in problems:
        for kind in kinds:
            ref = dense_oracle(kind, H, u)
            for method in METHODS:
                r = approximate(method, kind, H, u, 2 * n, reference=ref)
                err = np.inf if r.rel_error is None else r.rel_error
                out.append(_res('driver', '%s %s %s full width'
                                % (label, method, kind), err, 1e-8))
    return out


SUITES = {'core': suite_core, 'heks': suite_heks,
          'full-reduction': suite_full_reduction,
          'reference': suite_reference, 'matfunc': suite_matfunc,
          'driver': suite_driver}


def run_checks(suites=None, n=10, seed=0, inject=None):
    """Run the named suites (default: all) and return their results."""
    if inject is not None and inject not in INJECTIONS:
        raise ValueError('unknown injection %r' % inject)
    names = list(SUITES) if not suites or suites == ['all'] else suites
    results = []
    for name in names:
        name = SUITE_ALIASES.get(name, name)
        if name not in SUITES:
            raise ValueError('unknown suite %r; choose from %s'
                             % (name, sorted(SUITES)))
        results.extend(SUITES[name](n, seed, inject))
    return results

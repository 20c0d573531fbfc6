"""Command-line entry point: ``hamkrylov {gen,build,sweep,check}``.

Exit codes: 0 success (including a lucky breakdown), 1 configuration or
I/O error, 2 serious breakdown, 3 failed self-check. ``HAMKRYLOV_OUTDIR``
sets the directory for outputs whose path is not given explicitly.
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .checks import INJECTIONS, SUITE_ALIASES, SUITES, run_checks
from .driver import METHODS, convergence_sweep, write_sweep_csv
from .errors import HamKrylovError
from .export import export_binary, export_csv
from .generators import (gen_diag_logspace, gen_jk_spd, load_matrix_market,
                         save_matrix_market)
from .heks import (COUNT_MODES, BreakdownReport, heks_build,
                   normalize_count_mode)
from .jform import jmatrix, symplectic_residual
from .matfunc import MatFunKind
from .operators import DenseHamiltonian, HamiltonianOperator, OpCounters
from .reference import arnoldi, eksm, hamiltonian_lanczos

OUTDIR_ENV = 'HAMKRYLOV_OUTDIR'
EXIT_OK, EXIT_CONFIG, EXIT_SERIOUS, EXIT_CHECK = 0, 1, 2, 3
GENERATORS = ('diag-logspace', 'jk-spd')
# largest 2n for which matrices are densified (oracle, dense factorization)
DENSE_LIMIT = 4000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for breakdowns here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, '%s: error: %s\n' % (self.prog, message))


def _count_mode(text):
    try:
        return normalize_count_mode(text)
    except ValueError:
        raise argparse.ArgumentTypeError('invalid count mode %r' % text)


def _suite_name(text):
    return SUITE_ALIASES.get(text, text)


def _outpath(path, default_name):
    if path:
        return path
    return os.path.join(os.environ.get(OUTDIR_ENV, '.'), default_name)


def _csv_list(text, allowed, what):
    items = [t.strip() for t in text.split(',') if t.strip()]
    bad = [t for t in items if t not in allowed]
    if bad:
        raise UsageError('unknown %s %s; choose from %s'
                         % (what, ', '.join(bad), ', '.join(allowed)))
    return items


def _generate(kind, n, lo, hi, seed):
    if n is None or n < 1:
        raise UsageError('--n must be a positive integer')
    if kind == 'diag-logspace':
        if not (lo > 0 and hi > lo):
            raise UsageError('diag-logspace needs 0 < --lo < --hi, got '
                             '[%g, %g]' % (lo, hi))
        return gen_diag_logspace(n, lo, hi)
    return gen_jk_spd(n, seed)


def _skew_form_min(H):
    """Smallest eigenvalue of ``-J H``; positive means every ``w^T J H w``
    is negative."""
    K = -jmatrix(H.n) @ H.matrix
    return float(np.linalg.eigvalsh(0.5 * (K + K.T))[0])


def _load_matrix(args):
    """Operator for the matrix source in ``args``."""
    if args.matrix:
        M = load_matrix_market(args.matrix, sparse=True)
        if M.shape[0] <= DENSE_LIMIT:
            H = DenseHamiltonian.from_matrix(M.toarray())
            return HamiltonianOperator.from_dense(H, counters=OpCounters())
        return HamiltonianOperator.from_sparse(M, counters=OpCounters(),
                                               check=False)
    if not args.kind:
        raise UsageError('give a matrix source: --matrix PATH or --kind')
    H = _generate(args.kind, args.n, args.lo, args.hi, args.seed)
    return HamiltonianOperator.from_dense(H, counters=OpCounters())


def _start_vector(args, dim):
    source = args.u
    if source == 'ones':
        return np.ones(dim)
    if source == 'random':
        return np.random.default_rng(args.u_seed).standard_normal(dim)
    if source == 'e1':
        u = np.zeros(dim)
        u[0] = 1.0
        return u
    try:
        u = (np.load(source) if source.endswith('.npy')
             else np.loadtxt(source))
    except (OSError, ValueError) as exc:
        raise UsageError('cannot read starting vector %s: %s'
                         % (source, exc)) from exc
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (dim,):
        raise UsageError('starting vector has %d entries, matrix needs %d'
                         % (u.size, dim))
    return u


def _add_matrix_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument('--matrix', metavar='PATH',
                     help='Matrix Market file holding a Hamiltonian matrix')
    src.add_argument('--kind', choices=GENERATORS,
                     help='generate the matrix instead of reading it')
    p.add_argument('--n', type=int, help='half dimension for --kind')
    p.add_argument('--lo', type=float, default=0.1)
    p.add_argument('--hi', type=float, default=1.0)
    p.add_argument('--seed', type=int, default=0,
                   help='generator seed (jk-spd)')


def _add_run_args(p):
    p.add_argument('--u', default='ones', metavar='SOURCE',
                   help="starting vector: 'ones', 'random', 'e1' or a "
                        "text/.npy file (default: ones)")
    p.add_argument('--u-seed', type=int, default=0,
                   help="seed for --u random")
    p.add_argument('--reorth', choices=('none', 'one_pass', 'two_pass'),
                   default='one_pass')
    p.add_argument('--count-mode', type=_count_mode, choices=COUNT_MODES,
                   default='full',
                   help="'recurrence' tallies only the bare recurrence; "
                        're-orthogonalization is still performed')
    p.add_argument('--breakdown-tol', type=float, default=1e-12)


def cmd_gen(args):
    H = _generate(args.kind, args.n, args.lo, args.hi, args.seed)
    if args.kind == 'diag-logspace':
        name = 'diag-logspace-n%d.mtx' % args.n
        comment = 'diag-logspace n=%d lo=%g hi=%g' % (args.n, args.lo, args.hi)
    else:
        name = 'jk-spd-n%d-s%d.mtx' % (args.n, args.seed)
        comment = 'jk-spd n=%d seed=%d' % (args.n, args.seed)
    path = _outpath(args.out, name)
    save_matrix_market(path, H, comment=comment)
    print('wrote %s (%d x %d)' % (path, H.dim, H.dim))
    if args.kind == 'jk-spd':
        lam = _skew_form_min(H)
        print('definite skew form: min eig(-JH) = %.6g (%s)'
              % (lam, 'ok' if lam > 0 else 'NOT definite'))
        if lam <= 0:
            return EXIT_CONFIG
    return EXIT_OK


def _report_stages(stage_counters):
    print('%6s %8s %7s %7s' % ('stage', 'matvecs', 'solves', 'dots'))
    for i, (mv, sv, dt) in enumerate(stage_counters, start=1):
        print('%6d %8d %7d %7d' % (i, mv, sv, dt))


def cmd_build(args):
    op = _load_matrix(args)
    u = _start_vector(args, op.dim)
    m = args.columns
    if not 1 <= m <= op.dim:
        raise UsageError('--columns must lie in [1, %d]' % op.dim)
    method = args.method
    if method in ('heks', 'haml') and m % 2:
        raise UsageError('%s needs an even --columns' % method)
    opts = dict(reorth=args.reorth, breakdown_tol=args.breakdown_tol,
                count_mode=args.count_mode)
    coeffs = None
    if method == 'heks':
        res = heks_build(op, u, target_columns=m, **opts)
        S, coeffs = res.basis.S, res.coeffs
        label, resid = 'symplectic residual', symplectic_residual(S)
    elif method == 'haml':
        res = hamiltonian_lanczos(op, u, m // 2, **opts)
        S = res.basis.S
        coeffs = {'theta': res.theta, 'alpha': res.alpha, 'beta': res.beta}
        label, resid = 'symplectic residual', symplectic_residual(S)
    else:
        res = (eksm if method == 'eksm' else arnoldi)(op, u, m, **opts)
        S = res.Q
        label = 'orthogonality residual'
        resid = float(np.linalg.norm(S.T @ S - np.eye(S.shape[1])))
    print('%s: %d x %d basis' % (method, S.shape[0], S.shape[1]))
    print('%s: %.3e' % (label, resid))
    _report_stages(res.stage_counters)
    mv, sv, dt = res.counters
    print('total (%s count): %d matvecs, %d solves, %d dots'
          % (normalize_count_mode(args.count_mode), mv, sv, dt))
    if args.export:
        writer = export_csv if args.format == 'csv' else export_binary
        for path in writer(args.export, S, coeffs):
            print('wrote %s' % path)
    status = res.status
    if isinstance(status, BreakdownReport):
        print(str(status))
        if not status.lucky:
            return EXIT_SERIOUS
        print('notice: the basis spans an invariant subspace')
    return EXIT_OK


def _dense_guard(dim, limit):
    if dim > limit:
        raise UsageError(
            'the dense reference f(H)u needs a %d x %d matrix, above the '
            'limit of %d; use a smaller matrix or raise --max-dense'
            % (dim, dim, limit))


def cmd_sweep(args):
    methods = _csv_list(args.methods, METHODS, 'method')
    kinds = _csv_list(args.functions, [k.value for k in MatFunKind],
                      'function')
    if args.kind and args.n is not None:
        _dense_guard(2 * args.n, args.max_dense)
    op = _load_matrix(args)
    _dense_guard(op.dim, args.max_dense)
    u = _start_vector(args, op.dim)
    m_max = args.m_max if args.m_max is not None else min(op.dim, 30)
    rows = convergence_sweep(methods, kinds, op, u, m_max, stride=args.stride,
                             reorth=args.reorth,
                             breakdown_tol=args.breakdown_tol,
                             count_mode=args.count_mode, jobs=args.jobs)
    if args.out == '-':
        sys.stdout.write(write_sweep_csv(rows))
        return EXIT_OK
    path = _outpath(args.out, 'sweep.csv')
    write_sweep_csv(rows, path)
    print('wrote %s (%d rows)' % (path, len(rows)))
    for method in methods:
        for kind in kinds:
            errs = [r for r in rows if r.method == method and r.kind == kind
                    and r.rel_error is not None]
            if errs:
                last = errs[-1]
                print('%-8s %-5s %3d columns  rel_error %.3e'
                      % (method, kind, last.columns, last.rel_error))
    return EXIT_OK


def cmd_check(args):
    suites = args.suite or ['all']
    results = run_checks(suites, n=args.n, seed=args.seed, inject=args.inject)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print('%d checks, %d failed' % (len(results), failed))
    return EXIT_CHECK if failed else EXIT_OK


def build_parser():
    p = _Parser(prog='hamkrylov',
                description='Hamiltonian extended Krylov bases and f(H)u '
                            'benchmarks.')
    p.add_argument('--version', action='version', version=__version__)
    p.add_argument('-v', '--verbose', action='store_true')
    sub = p.add_subparsers(dest='command', required=True,
                           parser_class=_Parser)

    g = sub.add_parser('gen', help='write a test matrix in Matrix Market '
                                   'format')
    g.add_argument('--kind', choices=GENERATORS, required=True)
    g.add_argument('--n', type=int, required=True)
    g.add_argument('--lo', type=float, default=0.1)
    g.add_argument('--hi', type=float, default=1.0)
    g.add_argument('--seed', type=int, default=0)
    g.add_argument('--out', metavar='PATH')
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser('build', help='build one basis and report its cost')
    _add_matrix_args(b)
    b.add_argument('--method', choices=METHODS, default='heks')
    b.add_argument('--columns', type=int, required=True)
    _add_run_args(b)
    b.add_argument('--export', metavar='PREFIX',
                   help='dump basis and coefficients under PREFIX')
    b.add_argument('--format', choices=('csv', 'bin'), default='csv')
    b.set_defaults(func=cmd_build)

    s = sub.add_parser('sweep', help='relative error of f(H)u versus basis '
                                     'width')
    _add_matrix_args(s)
    s.add_argument('--methods', default=','.join(METHODS))
    s.add_argument('--functions', default='exp,cos,sign',
                   help='comma separated; may be empty')
    s.add_argument('--m-max', type=int)
    s.add_argument('--stride', type=int, default=2)
    s.add_argument('--jobs', type=int, default=1)
    s.add_argument('--max-dense', type=int, default=DENSE_LIMIT)
    s.add_argument('--out', metavar='PATH', help="CSV path, '-' for stdout")
    _add_run_args(s)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser('check', help='run the seeded self-check suites')
    c.add_argument('--suite', action='append', type=_suite_name,
                   choices=sorted(SUITES) + ['all'])
    c.add_argument('--n', type=int, default=10)
    c.add_argument('--seed', type=int, default=0)
    c.add_argument('--inject', choices=INJECTIONS,
                   help='corrupt a coefficient to exercise the checks')
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else
                        logging.WARNING, format='%(name)s: %(message)s')
    try:
        return args.func(args)
    except (UsageError, HamKrylovError, ValueError, OSError,
            ArithmeticError) as exc:
        print('hamkrylov %s: error: %s' % (args.command, exc),
              file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())

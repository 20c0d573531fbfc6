"""J-orthogonal bases of Hamiltonian extended Krylov subspaces and
structure-preserving approximations of ``f(H) u``."""
from .driver import (METHODS, ApproxResult, approximate, convergence_sweep,
                     dense_oracle, write_sweep_csv)
from .errors import (BreakdownError, DimensionError, HamKrylovError,
                     ImaginarySpectrumError, MatrixParseError,
                     SingularMatrixError, StructureError)
from .generators import (gen_diag_logspace, gen_jk_spd, gen_real_spectrum,
                         load_matrix_market, save_matrix_market)
from .heks import (BreakdownReport, BuildOptions, HeksBuilder,
                   HeksCoefficients, HeksResult, SymplecticBasis, heks_build)
from .jform import (JForm, hamiltonian_residual, jdot, jmul, jtmul,
                    skew_hamiltonian_residual, symplectic_residual)
from .matfunc import MatFunKind, apply_matfunc, cosm_dense, expm_dense, signm_dense
from .operators import (DenseHamiltonian, HamiltonianOperator, OpCounters,
                        as_operator, solve_hamiltonian)
from .projection import (assemble_projected_H, assemble_projected_Hinv,
                         recurrence_residual, validate_zero_pattern)
from .reference import arnoldi, eksm, hamiltonian_lanczos

__version__ = '0.1.0'

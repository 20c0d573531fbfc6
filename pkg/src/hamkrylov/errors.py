"""Exception hierarchy used across the package."""


class HamKrylovError(Exception):
    """Base class for all errors raised by :mod:`hamkrylov`."""


class DimensionError(HamKrylovError, ValueError):
    """Raised when an array has an odd or otherwise incompatible size."""


class StructureError(HamKrylovError, ValueError):
    """Raised when a matrix fails a Hamiltonian/symplectic structure check."""


class MatrixParseError(HamKrylovError, ValueError):
    """Raised when a Matrix Market file cannot be read."""


class SingularMatrixError(HamKrylovError, ArithmeticError):
    """Raised when a factorization reveals a (numerically) singular matrix."""


class ImaginarySpectrumError(HamKrylovError, ArithmeticError):
    """Raised when the sign function is requested for a matrix with
    eigenvalues on (or too close to) the imaginary axis."""


class BreakdownError(HamKrylovError, RuntimeError):
    """Raised when a basis builder cannot produce the requested width.

    The attached ``report`` is a :class:`hamkrylov.heks.BreakdownReport`.
    """

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report

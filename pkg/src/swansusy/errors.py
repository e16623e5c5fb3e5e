"""Exception hierarchy shared by every module of the package."""


class SwansusyError(Exception):
    """Base class for all package errors."""


class DimensionError(SwansusyError, ValueError):
    """Operand shapes are incompatible."""


class NotHermitianError(SwansusyError, ValueError):
    """A Hermitian-only routine received a non-Hermitian matrix."""


class SingularMatrixError(SwansusyError, ValueError):
    """LU factorization hit a pivot below the singularity threshold."""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class ConvergenceError(SwansusyError, RuntimeError):
    """The general eigensolver failed to converge."""


class ExpmOverflowError(SwansusyError, OverflowError):
    """Matrix norm exceeds the bound accepted by :func:`expm_general`."""


class LayoutError(SwansusyError, ValueError):
    """Invalid mode layout or an operator request that does not fit it."""


class GradeError(SwansusyError, ValueError):
    """Operators of different Z2 grade were combined, or a grade check failed."""


class ParameterError(SwansusyError, ValueError):
    """Physical parameters violate a validity invariant."""


class MetricUndefined(SwansusyError, ValueError):
    """No metric of the one-parameter family exists at the requested z."""


class NonPositive(SwansusyError, ValueError):
    """mu or nu came out non-positive."""


class FactorizationUndefined(SwansusyError, ValueError):
    """A denominator of the disentangled form of rho is not positive."""


class IdentityViolation(SwansusyError, ArithmeticError):
    """A scalar closure identity missed its tolerance."""


class ConfigError(SwansusyError, ValueError):
    """Run configuration could not be parsed or validated."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

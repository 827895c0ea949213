"""Exception types shared across the package."""


class MomentKitError(Exception):
    """Base class for all momentkit errors."""


class DomainError(MomentKitError, ValueError):
    """Illegal order index, method parameter, or argument range."""


class SingularKernelError(MomentKitError, ArithmeticError):
    """A radial kernel was evaluated at a point where it is unbounded."""


class SchemeError(MomentKitError, ValueError):
    """Scheme is internally inconsistent or illegal for the chosen method."""


class DataError(MomentKitError, ValueError):
    """Malformed input data (image files, moment files, configs)."""


class InstabilityFlag(MomentKitError, ArithmeticError):
    """Raised in strict mode when a computation produced non-finite moments."""

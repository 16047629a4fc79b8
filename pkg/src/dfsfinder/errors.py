"""Exception types raised across the package."""


class DfsError(Exception):
    """Base class for all package errors."""


class NotSquare(DfsError, ValueError):
    pass


class NotHermitian(DfsError, ValueError):
    pass


class NotPsd(DfsError, ValueError):
    pass


class DimensionMismatch(DfsError, ValueError):
    pass


class NotNormalized(DfsError, ValueError):
    pass


class NotDensityMatrix(DfsError, ValueError):
    pass


class InvalidSubspace(DfsError, ValueError):
    """A subspace does not satisfy the eigen-conditions claimed for it."""


class StepCapExceeded(DfsError, RuntimeError):
    """The integrator could not reach the requested accuracy within the step cap."""


class TooLarge(DfsError, ValueError):
    pass


class TruncationTooSmall(DfsError, ValueError):
    pass


class ModelFileError(DfsError, ValueError):
    """A model or report document failed to parse or validate.

    The message always names the offending field.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")

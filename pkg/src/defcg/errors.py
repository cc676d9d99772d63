"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError -> 4.
"""


class DefcgError(Exception):
    """Base class for all package errors."""


class ConfigError(DefcgError):
    """Invalid experiment configuration."""


class DataError(DefcgError):
    """Problem reading or interpreting input data."""


class NumericalError(DefcgError):
    """A numerical routine could not complete."""


class DimensionMismatch(NumericalError):
    """Operand shapes are incompatible."""


class NotPositiveDefinite(NumericalError):
    """Cholesky hit a non-positive pivot; the SPD contract is violated."""

    def __init__(self, pivot_index, message=None):
        self.pivot_index = pivot_index
        super().__init__(message or f"non-positive pivot at index {pivot_index}")


class NoConvergence(NumericalError):
    """An iterative eigensolver exhausted its sweep budget."""

    def __init__(self, sweeps):
        self.sweeps = sweeps
        super().__init__(f"no convergence after {sweeps} sweeps")


class BreakdownZeroCurvature(NumericalError):
    """CG encountered p'Ap <= 0, which cannot happen for SPD input."""

    def __init__(self, iteration):
        self.iteration = iteration
        super().__init__(f"non-positive curvature at iteration {iteration}")


class GramNotSpd(NumericalError):
    """The deflation Gram matrix W'AW is not positive definite."""


class BasisDeficient(NumericalError):
    """Pruning left fewer basis columns than requested."""

    def __init__(self, remaining):
        self.remaining = remaining
        super().__init__(f"only {remaining} independent basis columns remain")


class InvalidLabel(DataError):
    """Classification labels must be -1 or +1."""


class StateInconsistent(NumericalError):
    """The latent state violates f = K a beyond tolerance."""


class NoProgress(NumericalError):
    """The Newton objective decreased; the linear solves are too loose."""


class BadMagic(DataError):
    """An IDX file starts with an unexpected magic number."""

    def __init__(self, found):
        self.found = found
        super().__init__(f"unexpected IDX magic number {found}")


class TruncatedFile(DataError):
    """An IDX file ended before the declared payload."""


class DigitAbsent(DataError):
    """A requested digit does not occur in the label file."""

    def __init__(self, digit):
        self.digit = digit
        super().__init__(f"digit {digit} not present in label file")

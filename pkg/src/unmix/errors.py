"""Exception types shared across the package.

The CLI maps these onto exit codes: DataError family -> 2,
DegeneracyError -> 3, anything argparse rejects -> 1.
"""


class UnmixError(Exception):
    """Base class for all errors raised by this package."""


class DataError(UnmixError, ValueError):
    """Malformed, mis-shaped, or statistically unusable input data."""


class DimensionError(DataError):
    """Operand shapes are incompatible."""


class SingularMatrixError(DataError):
    """A matrix required to be invertible is singular or ill-conditioned."""


class RankDeficientError(DataError):
    """A covariance matrix has a near-zero eigenvalue; whitening is undefined."""


class DegeneracyError(UnmixError, RuntimeError):
    """A solver's identifiability condition failed (tied spectra, duplicate points)."""

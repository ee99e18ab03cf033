"""Mean-centering, covariance estimation, and the whitening transform.

The whitening matrix is D^(-1/2) E^T where E, D come from the covariance
eigendecomposition; applying it to centered data gives unit covariance.
The covariance uses divisor n (the expectation convention), not n-1, so
small samples will differ slightly from n-1 libraries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError, RankDeficientError
from .linalg import EigenDecomposition, as_matrix, sym_eig

RANK_REL_TOL = 1e-10
CENTERED_REL_TOL = 1e-8


def as_data(values, name: str = "data", min_rows: int = 1) -> np.ndarray:
    """Validate an n-samples-by-d-dimensions array."""
    x = as_matrix(values, name)
    if x.shape[0] < min_rows:
        raise DataError(f"{name} needs at least {min_rows} samples, got {x.shape[0]}")
    return x


@dataclass(frozen=True, eq=False)
class WhiteningTransform:
    """The map D^(-1/2) E^T plus the mean it subtracts before applying."""

    mean: np.ndarray
    matrix: np.ndarray
    eigen: EigenDecomposition

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def center(data) -> tuple[np.ndarray, np.ndarray]:
    """Subtract the per-dimension sample mean; returns (centered, mean)."""
    x = as_data(data)
    mean = x.mean(axis=0)
    return x - mean, mean


def covariance(data) -> np.ndarray:
    """Sample covariance (1/n) X^T X of centered data.

    Rejects data whose column means are not negligible against the column
    spread; centering is the caller's explicit pipeline step.
    """
    x = as_data(data, min_rows=2)
    mean = x.mean(axis=0)
    stdev = np.sqrt((x * x).mean(axis=0))
    if np.any(np.abs(mean) > CENTERED_REL_TOL * stdev):
        j = int(np.argmax(np.abs(mean) - CENTERED_REL_TOL * stdev))
        raise DataError(
            f"data is not centered: column {j} has mean {mean[j]:.3e} "
            f"(stdev {stdev[j]:.3e}); call center() first"
        )
    return x.T @ x / x.shape[0]


def whitening_transform(cov, mean=None) -> WhiteningTransform:
    """Build D^(-1/2) E^T from a symmetric PSD covariance.

    Fails when the smallest eigenvalue is below 1e-10 times the largest;
    a rank-deficient covariance has no finite whitening filter.
    """
    c = as_matrix(cov, "covariance")
    eig = sym_eig(c, psd=True)
    lam = eig.eigenvalues
    if lam[0] <= 0.0:
        raise RankDeficientError("covariance is identically zero")
    floor = RANK_REL_TOL * lam[0]
    if lam[-1] <= floor:
        j = int(np.argmax(lam <= floor))
        raise RankDeficientError(
            f"covariance is rank deficient: eigenvalue {j} is {lam[j]:.3e} "
            f"(largest {lam[0]:.3e}); cannot whiten"
        )
    matrix = eig.eigenvectors.T / np.sqrt(lam)[:, None]
    if mean is None:
        mean = np.zeros(c.shape[0])
    return WhiteningTransform(mean=np.asarray(mean, dtype=float), matrix=matrix, eigen=eig)


def apply_whitening(transform: WhiteningTransform, data) -> np.ndarray:
    """Whiten data: (x - mean) mapped through D^(-1/2) E^T."""
    x = as_data(data)
    if x.shape[1] != transform.dim:
        raise DimensionError(
            f"data has {x.shape[1]} dimensions, transform expects {transform.dim}"
        )
    return (x - transform.mean) @ transform.matrix.T


def fit_whitening(data) -> tuple[WhiteningTransform, np.ndarray]:
    """Center, estimate covariance, build the transform; returns (transform, x_w)."""
    centered, mean = center(data)
    cov = covariance(centered)
    transform = whitening_transform(cov, mean=mean)
    return transform, centered @ transform.matrix.T

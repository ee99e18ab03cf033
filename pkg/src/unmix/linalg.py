"""Dense real matrix helpers and a symmetric eigensolver.

Everything here is self-contained numpy arithmetic: the eigensolver is a
cyclic Jacobi iteration and the inverse is Gauss-Jordan elimination with
partial pivoting. No LAPACK-backed solver is called.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError, SingularMatrixError

JACOBI_SWEEPS_MAX = 100
JACOBI_REL_TOL = 1e-12
PSD_CLAMP_TOL = 1e-10
PIVOT_REL_TOL = 1e-12


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array and validate the basic invariants."""
    a = np.asarray(values, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} contains non-finite entries")
    return a


def _require_square(a: np.ndarray, name: str) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Orthonormal eigenvectors (columns) and descending eigenvalues."""

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray

    def reconstruct(self) -> np.ndarray:
        e = self.eigenvectors
        return (e * self.eigenvalues) @ e.T


def mat_mul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def is_orthogonal(m, tol: float) -> bool:
    """True iff max |(m^T m - I)_ij| <= tol."""
    a = _require_square(as_matrix(m), "matrix")
    gram = a.T @ a
    return float(np.max(np.abs(gram - np.eye(a.shape[0])))) <= tol


def invert(m) -> np.ndarray:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting."""
    a = _require_square(as_matrix(m), "matrix").copy()
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n)])
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        raise SingularMatrixError("singular matrix: all entries are zero")
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[pivot_row, col]
        if abs(pivot) <= PIVOT_REL_TOL * scale:
            raise SingularMatrixError(
                f"singular or ill-conditioned matrix: pivot magnitude "
                f"{abs(pivot):.3e} at column {col} (scale {scale:.3e})"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0.0:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:].copy()


def sym_eig(m, psd: bool = False) -> EigenDecomposition:
    """Eigendecompose a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius mass drops below
    1e-12 * ||m||_F (at most 100 sweeps). Eigenvalues are returned in
    descending order with each eigenvector's largest-magnitude entry
    made positive, so the output is deterministic.

    With psd=True, eigenvalues in [-1e-10 * scale, 0) are clamped to 0
    and anything more negative raises (the input was not a covariance).
    """
    a = _require_square(as_matrix(m), "matrix")
    sym_dev = float(np.max(np.abs(a - a.T)))
    if sym_dev > 1e-9 * (1.0 + float(np.max(np.abs(a)))):
        raise DataError(f"matrix is not symmetric (max |a - a^T| = {sym_dev:.3e})")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    fro = math.sqrt(float((a * a).sum()))
    target = JACOBI_REL_TOL * fro

    for _ in range(JACOBI_SWEEPS_MAX):
        upper = a[np.triu_indices(n, k=1)]
        off = math.sqrt(2.0 * float((upper * upper).sum()))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                akp = a[:, p].copy()
                akq = a[:, q].copy()
                a[:, p] = c * akp - s * akq
                a[:, q] = s * akp + c * akq
                arp = a[p, :].copy()
                arq = a[q, :].copy()
                a[p, :] = c * arp - s * arq
                a[q, :] = s * arp + c * arq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vkp = v[:, p].copy()
                vkq = v[:, q].copy()
                v[:, p] = c * vkp - s * vkq
                v[:, q] = s * vkp + c * vkq

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    for j in range(n):
        peak = int(np.argmax(np.abs(v[:, j])))
        if v[peak, j] < 0.0:
            v[:, j] = -v[:, j]

    if psd:
        clamp = PSD_CLAMP_TOL * max(1.0, float(np.max(np.abs(eigenvalues))))
        if np.any(eigenvalues < -clamp):
            worst = float(eigenvalues.min())
            raise DataError(
                f"matrix is not positive semi-definite (eigenvalue {worst:.3e}); "
                "not a covariance"
            )
        eigenvalues = np.maximum(eigenvalues, 0.0)

    return EigenDecomposition(eigenvectors=v, eigenvalues=eigenvalues)

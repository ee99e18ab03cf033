"""Rotation search minimizing the sum of marginal entropies, plus FOBI.

After whitening, the unmixing problem reduces to one orthogonal matrix.
Three solvers are provided:

  sweep_2d       exhaustive angle grid over [0, 180) for d = 2
  givens_descent cyclic coordinate descent over Givens planes for d >= 2,
                 each plane solved by grid search plus golden-section
                 refinement of the pair's marginal-entropy objective
  fobi           closed form: eigenvectors of the norm-weighted covariance,
                 valid only when its eigenvalues are distinct (sources with
                 equal kurtosis are not separable this way)

All returned rotations are canonicalized (rows ordered by descending
kurtosis of the recovered marginals, peaks made positive) so that the
inherent permutation/flip ambiguities resolve deterministically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import _marginal_bits_rows
from .errors import DataError, DegeneracyError, DimensionError
from .linalg import invert, sym_eig
from .whitening import WhiteningTransform, as_data, fit_whitening

WHITENED_COV_TOL = 0.05
FLAT_RANGE_BITS = 0.15
CONVERGED_IMPROVE_BITS = 1e-3
FLAT_WARNING = "flat objective landscape: possibly Gaussian / unidentifiable rotation"
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Objective (and optionally multi-information) on an angle grid."""

    angles_deg: np.ndarray
    objective_bits: np.ndarray
    multi_info_bits: np.ndarray | None
    argmin_deg: float


@dataclass(frozen=True, eq=False)
class GivensResult:
    rotation: np.ndarray
    converged: bool
    flat_landscape: bool
    sweeps: int
    objective_bits: float


@dataclass(frozen=True, eq=False)
class UnmixingModel:
    """Full unmixing W = V D^(-1/2) E^T with its parts and diagnostics."""

    rotation: np.ndarray
    whitening: WhiteningTransform
    unmixing: np.ndarray
    mixing_estimate: np.ndarray
    objective_bits: float
    method: str
    warnings: tuple[str, ...]
    converged: bool
    angle_deg: float | None = None

    @property
    def dim(self) -> int:
        return self.unmixing.shape[0]


def rotation_2d(theta_deg: float) -> np.ndarray:
    """2-D rotation [[cos, -sin], [sin, cos]] for an angle in degrees."""
    if not math.isfinite(theta_deg):
        raise DataError("rotation angle must be finite")
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def _require_whitened(data_w: np.ndarray) -> None:
    n, d = data_w.shape
    cov = data_w.T @ data_w / n
    dev = float(np.max(np.abs(cov - np.eye(d))))
    if dev > WHITENED_COV_TOL:
        raise DataError(
            f"data is not whitened (covariance deviates from identity by {dev:.3f}); "
            "the objective derivation requires unit covariance"
        )


def _columns_bits(y: np.ndarray) -> float:
    sorted_cols = np.sort(y.T, axis=1)
    return float(_marginal_bits_rows(sorted_cols).sum())


def objective(v, data_w) -> float:
    """Sum of marginal entropies of the rotated data, in bits."""
    x = as_data(data_w, "whitened data", min_rows=10)
    v = np.asarray(v, dtype=float)
    if v.shape != (x.shape[1], x.shape[1]):
        raise DimensionError(
            f"rotation shape {v.shape} does not match data dimension {x.shape[1]}"
        )
    _require_whitened(x)
    return _columns_bits(x @ v.T)


def _pair_curve(u: np.ndarray, v: np.ndarray, angles_deg: np.ndarray) -> np.ndarray:
    """Marginal-entropy sum of the rotated (u, v) pair at each angle."""
    t = np.deg2rad(angles_deg)
    c, s = np.cos(t), np.sin(t)
    h0 = _marginal_bits_rows(np.sort(c[:, None] * u - s[:, None] * v, axis=1))
    h1 = _marginal_bits_rows(np.sort(s[:, None] * u + c[:, None] * v, axis=1))
    return h0 + h1


def _pair_bits(u: np.ndarray, v: np.ndarray, deg: float) -> float:
    return float(_pair_curve(u, v, np.array([deg]))[0])


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def excess_kurtosis(y: np.ndarray) -> np.ndarray:
    """Per-column excess kurtosis m4/m2^2 - 3 of zero-mean data."""
    m2 = np.mean(y * y, axis=0)
    m4 = np.mean(y ** 4, axis=0)
    return m4 / (m2 * m2) - 3.0


def canonicalize_rotation(v: np.ndarray, data_w: np.ndarray) -> np.ndarray:
    """Fix the permutation/flip ambiguity of a recovered rotation.

    Rows are ordered by descending kurtosis of the marginals they recover
    (ties broken by the column index of the row's peak entry), then each
    row is flipped so its largest-magnitude entry is positive.
    """
    y = data_w @ v.T
    kurt = excess_kurtosis(y)
    peaks = np.argmax(np.abs(v), axis=1)
    order = np.lexsort((peaks, -kurt))
    out = v[order].copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0.0:
            out[i] = -out[i]
    return out


def sweep_2d(data_w, steps: int = 180, with_multi_info: bool = False, k: int = 3) -> SweepResult:
    """Evaluate the objective on a uniform angle grid over [0, 180).

    The objective has period 90 degrees; the 180-degree grid is kept for
    plot parity. The argmin is the grid minimum refined once by golden
    section within its bracketing interval.
    """
    x = as_data(data_w, "whitened data", min_rows=10)
    if x.shape[1] != 2:
        raise DimensionError(f"sweep requires 2-D data, got d={x.shape[1]}")
    if steps < 18:
        raise DataError(f"need at least 18 steps, got {steps}")
    _require_whitened(x)
    u, w = x[:, 0], x[:, 1]
    step = 180.0 / steps
    angles = np.arange(steps) * step
    curve = _pair_curve(u, w, angles)

    kmin = int(np.argmin(curve))
    refined, refined_val = _golden_min(
        lambda a: _pair_bits(u, w, a), angles[kmin] - step, angles[kmin] + step, 0.05
    )
    if refined_val <= curve[kmin]:
        argmin = float(refined % 180.0)
    else:
        argmin = float(angles[kmin])

    multi = None
    if with_multi_info:
        from .entropy import multi_information

        multi = np.array(
            [multi_information(x @ rotation_2d(a).T, k=k).bits for a in angles]
        )
    return SweepResult(
        angles_deg=angles, objective_bits=curve, multi_info_bits=multi, argmin_deg=argmin
    )


def givens_descent(
    data_w,
    grid_steps: int = 90,
    sweeps_max: int = 20,
    angle_tolerance_deg: float = 0.1,
) -> GivensResult:
    """Minimize the marginal-entropy sum over the orthogonal group.

    Cyclic coordinate descent across all coordinate pairs; each pair's
    angle is solved on a [0, 90) grid plus golden-section refinement.
    A step is accepted only if it strictly lowers the pair objective, so
    the total objective is monotone non-increasing. Non-convergence after
    sweeps_max returns the best rotation found, flagged not-converged.
    """
    x = as_data(data_w, "whitened data", min_rows=10)
    n, d = x.shape
    if d < 2:
        raise DimensionError("need at least 2 dimensions")
    _require_whitened(x)

    v = np.eye(d)
    y = x.copy()
    step = 90.0 / grid_steps
    grid = np.arange(grid_steps) * step
    flat = False
    converged = False
    sweeps = 0
    for sweep in range(sweeps_max):
        sweeps = sweep + 1
        improvement = 0.0
        max_range = 0.0
        for i in range(d - 1):
            for j in range(i + 1, d):
                u, w = y[:, i], y[:, j]
                curve = _pair_curve(u, w, grid)
                max_range = max(max_range, float(curve.max() - curve.min()))
                kmin = int(np.argmin(curve))
                best_deg, best_val = _golden_min(
                    lambda a: _pair_bits(u, w, a),
                    grid[kmin] - step,
                    grid[kmin] + step,
                    angle_tolerance_deg,
                )
                if curve[kmin] < best_val:
                    best_deg, best_val = float(grid[kmin]), float(curve[kmin])
                current = float(curve[0])
                if best_val < current:
                    t = math.radians(best_deg)
                    c, s = math.cos(t), math.sin(t)
                    yi = c * u - s * w
                    yj = s * u + c * w
                    y[:, i], y[:, j] = yi, yj
                    g = np.eye(d)
                    g[i, i] = c
                    g[i, j] = -s
                    g[j, i] = s
                    g[j, j] = c
                    v = g @ v
                    improvement += current - best_val
        if sweep == 0 and max_range < FLAT_RANGE_BITS:
            flat = True
        if improvement < CONVERGED_IMPROVE_BITS:
            converged = True
            break

    v = canonicalize_rotation(v, x)
    return GivensResult(
        rotation=v,
        converged=converged,
        flat_landscape=flat,
        sweeps=sweeps,
        objective_bits=_columns_bits(x @ v.T),
    )


def _fobi_rotation(x: np.ndarray, strict: bool) -> tuple[np.ndarray, bool]:
    """Eigenbasis of the norm-weighted covariance; flags tied spectra."""
    n = x.shape[0]
    norms = np.sum(x * x, axis=1)
    weighted = (x * norms[:, None]).T @ x / n
    eig = sym_eig(weighted, psd=True)
    lam = eig.eigenvalues
    gaps = -np.diff(lam)
    rel_gap_tol = min(max(25.0 / math.sqrt(n), 1e-6), 0.25)
    tied = bool(lam[0] <= 0.0 or np.min(gaps) / lam[0] < rel_gap_tol)
    if tied and strict:
        i = int(np.argmin(gaps))
        raise DegeneracyError(
            f"weighted-covariance eigenvalues {i} and {i + 1} are tied "
            f"({lam[i]:.4f} vs {lam[i + 1]:.4f}, threshold {rel_gap_tol:.3f} relative): "
            "sources with equal kurtosis are not separable by this method"
        )
    return eig.eigenvectors.T, tied


def fobi(data_w) -> np.ndarray:
    """Closed-form rotation from the fourth-order weighted covariance.

    Errors when the weighted-covariance spectrum has no usable gap; the
    threshold scales with sampling noise (~25/sqrt(n) relative).
    """
    x = as_data(data_w, "whitened data", min_rows=10)
    _require_whitened(x)
    v, _ = _fobi_rotation(x, strict=True)
    return canonicalize_rotation(v, x)


def fit_ica(
    data,
    method: str = "givens",
    *,
    grid_steps: int = 90,
    sweeps_max: int = 20,
    angle_tolerance_deg: float = 0.1,
) -> UnmixingModel:
    """Center, whiten, and solve the rotation; assemble the full model.

    Methods: "sweep2d" (d = 2 only), "givens", "fobi", and "fobi+givens"
    (descent started from the FOBI basis, where a tied spectrum is only a
    warning since the descent does the real work).
    """
    x = as_data(data, min_rows=2)
    n, d = x.shape
    if d < 2:
        raise DimensionError(f"need at least 2 dimensions, got {d}")
    if n < 50 * d:
        raise DataError(f"need at least {50 * d} samples for d={d}, got {n}")

    transform, xw = fit_whitening(x)
    notes: list[str] = []
    converged = True
    angle_deg = None

    if method == "sweep2d":
        if d != 2:
            raise DimensionError("method sweep2d requires d = 2")
        sweep = sweep_2d(xw, steps=2 * grid_steps)
        angle_deg = sweep.argmin_deg
        v = rotation_2d(angle_deg)
        if float(sweep.objective_bits.max() - sweep.objective_bits.min()) < FLAT_RANGE_BITS:
            notes.append(FLAT_WARNING)
    elif method == "givens":
        result = givens_descent(
            xw, grid_steps=grid_steps, sweeps_max=sweeps_max,
            angle_tolerance_deg=angle_tolerance_deg,
        )
        v = result.rotation
        converged = result.converged
        if result.flat_landscape:
            notes.append(FLAT_WARNING)
        if not result.converged:
            notes.append(f"descent did not converge within {sweeps_max} sweeps")
    elif method == "fobi":
        v = fobi(xw)
    elif method == "fobi+givens":
        v0, tied = _fobi_rotation(xw, strict=False)
        if tied:
            notes.append("fobi initializer has a tied spectrum; descent refines it")
        result = givens_descent(
            xw @ v0.T, grid_steps=grid_steps, sweeps_max=sweeps_max,
            angle_tolerance_deg=angle_tolerance_deg,
        )
        v = result.rotation @ v0
        converged = result.converged
        if result.flat_landscape:
            notes.append(FLAT_WARNING)
        if not result.converged:
            notes.append(f"descent did not converge within {sweeps_max} sweeps")
    else:
        raise DataError(
            f"unknown method {method!r}; expected sweep2d, givens, fobi, or fobi+givens"
        )

    v = canonicalize_rotation(v, xw)
    unmixing = v @ transform.matrix
    return UnmixingModel(
        rotation=v,
        whitening=transform,
        unmixing=unmixing,
        mixing_estimate=invert(unmixing),
        objective_bits=_columns_bits(xw @ v.T),
        method=method,
        warnings=tuple(notes),
        converged=converged,
        angle_deg=angle_deg,
    )


def recover_sources(model: UnmixingModel, data) -> np.ndarray:
    """Apply the unmixing model: s_hat = (x - mean) W^T."""
    x = as_data(data)
    if x.shape[1] != model.dim:
        raise DimensionError(
            f"data has {x.shape[1]} dimensions, model expects {model.dim}"
        )
    return (x - model.whitening.mean) @ model.unmixing.T

"""Ambiguity-aware scoring of recovered unmixing models against ground truth.

An unmixing estimate is only defined up to row permutation, sign flips and
rescaling, so quality is judged on the gain matrix G = W A: the Amari index
is 0 exactly when G is a scaled permutation matrix and grows toward 1 as
the mixture stays entangled.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .entropy import multi_information
from .errors import DataError, DimensionError
from .linalg import as_matrix, invert

EXACT_MATCH_DIM_MAX = 6


@dataclass(frozen=True, eq=False)
class RecoveryReport:
    amari_index: float
    gain_matrix: np.ndarray
    matched_permutation: tuple[int, ...]
    matched_signs: tuple[int, ...]
    multi_info_bits: float | None


def _gain_matrix(a_true, w_est) -> np.ndarray:
    a = as_matrix(a_true, "true mixing")
    w = as_matrix(w_est, "estimated unmixing")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"true mixing must be square, got {a.shape}")
    if w.shape != a.shape:
        raise DimensionError(f"shape mismatch: unmixing {w.shape} vs mixing {a.shape}")
    invert(a)  # enforces the invertibility precondition
    return w @ a


def amari_index(a_true, w_est) -> float:
    """Normalized distance of G = W A from a scaled permutation, in [0, 1].

    Rows of |G| are first normalized by their peak so the index is invariant
    under the three inherent ambiguities of the estimate: row permutation,
    sign flips, and row rescaling. 0 iff G is exactly a scaled permutation;
    1 in the fully entangled case (all entries equal in magnitude).
    """
    g = np.abs(_gain_matrix(a_true, w_est))
    d = g.shape[0]
    row_max = g.max(axis=1)
    if np.any(row_max == 0.0):
        raise DataError("gain matrix has an all-zero row")
    r = g / row_max[:, None]
    col_max = r.max(axis=0)
    if np.any(col_max == 0.0):
        raise DataError("gain matrix has an all-zero column")
    rows = float((r.sum(axis=1) - 1.0).sum())
    cols = float((r.sum(axis=0) / col_max - 1.0).sum())
    return (rows + cols) / (2.0 * d * (d - 1))


def match_components(w_est, a_true) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Assign each estimated component to a true source, with its sign.

    Exact assignment (max total |gain|) for d <= 6, greedy above; signs
    are chosen so every matched gain is positive.
    """
    g = _gain_matrix(a_true, w_est)
    d = g.shape[0]
    absg = np.abs(g)
    if d <= EXACT_MATCH_DIM_MAX:
        best_perm = max(
            permutations(range(d)), key=lambda p: sum(absg[i, p[i]] for i in range(d))
        )
        perm = tuple(best_perm)
    else:
        taken = set()
        assign = [0] * d
        # rows with the strongest peaks claim their column first
        for i in sorted(range(d), key=lambda r: -absg[r].max()):
            for j in np.argsort(-absg[i]):
                if int(j) not in taken:
                    assign[i] = int(j)
                    taken.add(int(j))
                    break
        perm = tuple(assign)
    signs = tuple(1 if g[i, perm[i]] >= 0.0 else -1 for i in range(d))
    return perm, signs


def independence_report(shat, k: int = 3) -> float:
    """Multi-information of the recovered sources, in bits."""
    return multi_information(shat, k=k).bits


def recovery_report(a_true, w_est, shat=None, k: int = 3) -> RecoveryReport:
    """Bundle the Amari index, matching, and optional independence check."""
    perm, signs = match_components(w_est, a_true)
    return RecoveryReport(
        amari_index=amari_index(a_true, w_est),
        gain_matrix=_gain_matrix(a_true, w_est),
        matched_permutation=perm,
        matched_signs=signs,
        multi_info_bits=None if shat is None else independence_report(shat, k=k),
    )

"""Blind source separation by entropy-minimizing rotation search.

The pipeline mirrors its three analytical steps: subtract the mean, whiten
via the covariance eigendecomposition, then find the remaining rotation by
minimizing the sum of marginal entropies (or by the closed-form FOBI
eigenbasis). Everything is built on plain numpy arrays.
"""

__version__ = "0.1.0"

from .entropy import (
    EntropyEstimate,
    MultiInformationEstimate,
    joint_entropy,
    marginal_entropy,
    multi_information,
)
from .errors import (
    DataError,
    DegeneracyError,
    DimensionError,
    RankDeficientError,
    SingularMatrixError,
    UnmixError,
)
from .evaluate import (
    RecoveryReport,
    amari_index,
    independence_report,
    match_components,
    recovery_report,
)
from .linalg import EigenDecomposition, invert, is_orthogonal, mat_mul, sym_eig
from .optimize import (
    GivensResult,
    SweepResult,
    UnmixingModel,
    fit_ica,
    fobi,
    givens_descent,
    objective,
    recover_sources,
    rotation_2d,
    sweep_2d,
)
from .synth import (
    MixtureDataset,
    SourceSpec,
    generate,
    mix,
    preset,
    sample_sources,
)
from .whitening import (
    WhiteningTransform,
    apply_whitening,
    center,
    covariance,
    fit_whitening,
    whitening_transform,
)

__all__ = [
    "DataError",
    "DegeneracyError",
    "DimensionError",
    "EigenDecomposition",
    "EntropyEstimate",
    "GivensResult",
    "MixtureDataset",
    "MultiInformationEstimate",
    "RankDeficientError",
    "RecoveryReport",
    "SingularMatrixError",
    "SourceSpec",
    "SweepResult",
    "UnmixError",
    "UnmixingModel",
    "WhiteningTransform",
    "amari_index",
    "apply_whitening",
    "center",
    "covariance",
    "fit_ica",
    "fit_whitening",
    "fobi",
    "generate",
    "givens_descent",
    "independence_report",
    "invert",
    "is_orthogonal",
    "joint_entropy",
    "marginal_entropy",
    "mat_mul",
    "match_components",
    "mix",
    "multi_information",
    "objective",
    "preset",
    "recover_sources",
    "recovery_report",
    "rotation_2d",
    "sample_sources",
    "sweep_2d",
    "sym_eig",
    "whitening_transform",
]

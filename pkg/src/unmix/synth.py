"""Synthetic factorial sources pushed through known mixing matrices.

Sources are zero-mean by construction and mutually independent because
each dimension draws from its own PCG64 substream (spawned from one seed),
so datasets are bit-exact reproducible for a fixed (spec, n, seed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError, SingularMatrixError
from .linalg import as_matrix, sym_eig
from .optimize import rotation_2d

MIXING_CONDITION_MAX = 1e6

_DIST_ARITY = {
    "gaussian": 1,          # sigma
    "laplacian": 1,         # scale
    "gaussian_mixture": 2,  # mode offset +-mu, component sigma
    "uniform": 1,           # half width
}


@dataclass(frozen=True)
class SourceSpec:
    """Per-dimension marginal distributions, all zero-mean."""

    dimensions: tuple[tuple, ...]

    def __post_init__(self):
        if not self.dimensions:
            raise DataError("source spec needs at least one dimension")
        norm = []
        for dim in self.dimensions:
            kind, *params = dim
            if kind not in _DIST_ARITY:
                raise DataError(f"unknown distribution {kind!r}")
            if len(params) != _DIST_ARITY[kind]:
                raise DataError(f"{kind} takes {_DIST_ARITY[kind]} parameter(s), got {params}")
            params = [float(p) for p in params]
            if any(p <= 0.0 for p in params):
                raise DataError(f"{kind} parameters must be positive, got {params}")
            norm.append((kind, *params))
        object.__setattr__(self, "dimensions", tuple(norm))

    @property
    def d(self) -> int:
        return len(self.dimensions)

    def variances(self) -> np.ndarray:
        """Closed-form marginal variances."""
        out = []
        for kind, *params in self.dimensions:
            if kind == "gaussian":
                out.append(params[0] ** 2)
            elif kind == "laplacian":
                out.append(2.0 * params[0] ** 2)
            elif kind == "gaussian_mixture":
                mu, sigma = params
                out.append(mu * mu + sigma * sigma)
            elif kind == "uniform":
                out.append(params[0] ** 2 / 3.0)
        return np.array(out)


@dataclass(frozen=True, eq=False)
class MixtureDataset:
    """Ground-truth sources, the mixing matrix, and the observed mixture."""

    sources: np.ndarray
    mixing: np.ndarray
    observed: np.ndarray
    seed: int
    spec: SourceSpec


def _sample_dim(kind: str, params: tuple[float, ...], n: int, rng: np.random.Generator):
    if kind == "gaussian":
        return rng.normal(0.0, params[0], size=n)
    if kind == "laplacian":
        return rng.laplace(0.0, params[0], size=n)
    if kind == "gaussian_mixture":
        mu, sigma = params
        modes = np.where(rng.integers(0, 2, size=n) == 1, mu, -mu)
        return modes + rng.normal(0.0, sigma, size=n)
    if kind == "uniform":
        return rng.uniform(-params[0], params[0], size=n)
    raise DataError(f"unknown distribution {kind!r}")


def sample_sources(spec: SourceSpec, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. samples of the factorial source vector."""
    if n < 1:
        raise DataError(f"need at least 1 sample, got {n}")
    streams = np.random.SeedSequence(seed).spawn(spec.d)
    cols = [
        _sample_dim(kind, tuple(params), n, np.random.Generator(np.random.PCG64(stream)))
        for (kind, *params), stream in zip(spec.dimensions, streams)
    ]
    return np.column_stack(cols)


def condition_number(a: np.ndarray) -> float:
    """Spectral condition estimate via the eigenvalues of a^T a."""
    lam = sym_eig(a.T @ a, psd=True).eigenvalues
    if lam[-1] <= 0.0:
        return math.inf
    return math.sqrt(lam[0] / lam[-1])


def mix(sources, a) -> np.ndarray:
    """Observed mixture x = A s, exactly linear, no noise term."""
    s = as_matrix(sources, "sources")
    a = as_matrix(a, "mixing matrix")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"mixing matrix must be square, got {a.shape}")
    if a.shape[1] != s.shape[1]:
        raise DimensionError(
            f"mixing matrix is {a.shape[0]}x{a.shape[1]} but sources have d={s.shape[1]}"
        )
    cond = condition_number(a)
    if not cond < MIXING_CONDITION_MAX:
        raise SingularMatrixError(
            f"mixing matrix is singular or ill-conditioned (condition ~{cond:.2e})"
        )
    return s @ a.T


def generate(spec: SourceSpec, mixing, n: int, seed: int) -> MixtureDataset:
    """Sample sources and mix them, retaining full ground truth."""
    sources = sample_sources(spec, n, seed)
    mixing = as_matrix(mixing, "mixing matrix")
    return MixtureDataset(
        sources=sources, mixing=mixing, observed=mix(sources, mixing), seed=seed, spec=spec
    )


PRESET_NAMES = ("x_formation", "bimodal_unimodal", "gaussian_isotropic")


def preset(name: str) -> tuple[SourceSpec, np.ndarray]:
    """Named example configurations with their default mixing matrices."""
    if name == "x_formation":
        spec = SourceSpec((("laplacian", 1.0), ("laplacian", 1.0)))
        a = np.array([[1.0, 0.35], [0.35, 1.0]])
        a /= np.sqrt((a * a).sum(axis=0))
        return spec, a
    if name == "bimodal_unimodal":
        spec = SourceSpec((("gaussian_mixture", 2.0, 0.5), ("gaussian", 1.0)))
        # Mixing chosen so cov(x) is diagonal with distinct entries and the
        # whitened sources sit exactly 45 degrees off-axis: whitening then
        # leaves a pure 45-degree rotation for the solver to find.
        scale = np.diag([math.sqrt(2.0), math.sqrt(0.5)])
        unit_var = np.diag(1.0 / np.sqrt(spec.variances()))
        return spec, scale @ rotation_2d(45.0) @ unit_var
    if name == "gaussian_isotropic":
        spec = SourceSpec((("gaussian", 1.0), ("gaussian", 1.0)))
        return spec, np.eye(2)
    raise DataError(f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}")

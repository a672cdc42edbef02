"""Frechet distance between Gaussian fits of two feature sets.

Works at any dimensionality; the intended protocol uses 64-dim pooled
features, where a full-rank covariance is still estimable from a few hundred
samples. Matrix square roots go through the symmetric form
(S1^(1/2) S2 S1^(1/2))^(1/2) so a real eigensolver suffices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Eigenvalues this far below zero indicate a broken covariance rather than
# round-off; they are still clipped, but with a warning.
NEG_EIG_WARN_TOL = 1e-6

_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix of a feature distribution."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.ndim != 1:
            raise ValueError(f"mean must be a vector, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(
                f"cov shape {cov.shape} does not match mean dimension {mean.size}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("Gaussian stats must be finite")
        if np.max(np.abs(cov - cov.T), initial=0.0) > _SYMMETRY_TOL:
            raise ValueError("covariance must be symmetric to within 1e-9")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def fit_gaussian(features: np.ndarray) -> GaussianStats:
    """Sample mean and covariance (divisor n-1) of a feature matrix.

    ``features`` is (n, d) with n >= 2; the covariance is symmetrized as
    (C + C^T)/2 to scrub accumulation asymmetry.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features must be a 2-D (n, dim) array, got shape {x.shape}")
    if x.shape[0] < 2:
        raise ValueError(f"need at least 2 feature rows to fit a covariance, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite values")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    return GaussianStats(mean=mean, cov=(cov + cov.T) / 2.0)


def _clipped_eigh(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eigvals, eigvecs = np.linalg.eigh(mat)
    if eigvals.size and eigvals[0] < -NEG_EIG_WARN_TOL:
        warnings.warn(
            f"covariance eigenvalue {eigvals[0]:.3e} is well below zero; "
            "input is not a valid covariance matrix",
            RuntimeWarning,
            stacklevel=3,
        )
    return np.clip(eigvals, 0.0, None), eigvecs


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = _clipped_eigh(mat)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def frechet_distance(g1: GaussianStats, g2: GaussianStats) -> float:
    """Squared Frechet distance between two Gaussians.

    ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1^(1/2) S2 S1^(1/2))^(1/2)), with
    negative eigenvalues clipped to zero and the result clamped at 0.
    """
    if g1.dim != g2.dim:
        raise ValueError(f"dimension mismatch: {g1.dim} vs {g2.dim}")
    diff = g1.mean - g2.mean
    root1 = _psd_sqrt(g1.cov)
    inner = root1 @ g2.cov @ root1
    inner_eigvals, _ = _clipped_eigh((inner + inner.T) / 2.0)
    trace_term = float(np.trace(g1.cov) + np.trace(g2.cov) - 2.0 * np.sum(np.sqrt(inner_eigvals)))
    return max(0.0, float(diff @ diff) + trace_term)


def fid(features_a: np.ndarray, features_b: np.ndarray) -> float:
    """Frechet distance between the Gaussian fits of two feature sets."""
    return frechet_distance(fit_gaussian(features_a), fit_gaussian(features_b))

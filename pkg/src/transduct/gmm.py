"""Gaussian mixture machinery: shared diagonal covariance, closed-form updates.

The mixture is balanced (uniform component weights) and all classes share one
length-d diagonal covariance. Log-densities drop the additive (2*pi)^(-d/2)
constant; it is uniform across classes and cancels wherever rows are
renormalized, so every consumer sees the same behavior at a known offset.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSigmaError, DimensionError, EmptyClassError, EmptyClassWarning
from .validation import as_float_matrix, check_same_dim, check_simplex

VARIANCE_FLOOR = 1e-8
EMPTY_CLASS_TOL = 1e-12
DEFAULT_TOP_M = 8


@dataclass(frozen=True)
class GmmState:
    """K x d class means plus the shared per-dimension variances."""

    mu: np.ndarray
    sigma_diag: np.ndarray

    @property
    def k(self) -> int:
        return self.mu.shape[0]

    @property
    def d(self) -> int:
        return self.mu.shape[1]


def log_likelihood(features: np.ndarray, state: GmmState) -> np.ndarray:
    """N x K matrix of log densities up to the dropped additive constant.

    Entry (i, k) is -0.5 * sum_m log sigma_m - 0.5 * sum_m (f_im - mu_km)^2 / sigma_m.
    """
    f = as_float_matrix(features, "features")
    mu = as_float_matrix(state.mu, "mu")
    sigma = np.asarray(state.sigma_diag, dtype=np.float64)
    check_same_dim(f, mu, "features", "mu")
    if sigma.ndim != 1 or sigma.shape[0] != f.shape[1]:
        raise DimensionError(f"sigma_diag must have length d={f.shape[1]}")
    if sigma.min() < VARIANCE_FLOOR:
        raise DegenerateSigmaError(f"sigma_diag entry below floor {VARIANCE_FLOOR}")

    const = -0.5 * float(np.log(sigma).sum())
    inv = 1.0 / sigma
    out = np.empty((f.shape[0], mu.shape[0]), dtype=np.float64)
    buf = np.empty_like(f)  # reused per class to keep the pass memory-bound once
    for k in range(mu.shape[0]):
        np.subtract(f, mu[k], out=buf)
        np.multiply(buf, buf, out=buf)
        out[:, k] = const - 0.5 * (buf @ inv)
    return out


def init_gmm(features: np.ndarray, y_hat: np.ndarray, top_m: int = DEFAULT_TOP_M) -> GmmState:
    """Means from each class's top_m most confident samples, variances 1/d.

    Confidence is the class's pseudo-label probability; ties break toward the
    lower sample index, and top_m saturates at N.
    """
    f = as_float_matrix(features, "features")
    y = check_simplex(y_hat, "pseudo-labels")
    if f.shape[0] != y.shape[0]:
        raise DimensionError("features and pseudo-labels disagree on N")
    if top_m < 1:
        raise DimensionError(f"top_m must be >= 1, got {top_m}")
    n, d = f.shape
    k = y.shape[1]
    m = min(int(top_m), n)
    mu = np.empty((k, d), dtype=np.float64)
    for j in range(k):
        idx = np.argsort(-y[:, j], kind="stable")[:m]
        mu[j] = f[idx].mean(axis=0)
    sigma = np.full(d, 1.0 / d, dtype=np.float64)
    return GmmState(mu, sigma)


def update_mu(features: np.ndarray, z: np.ndarray, mu_prev: np.ndarray | None = None) -> np.ndarray:
    """Assignment-weighted means: mu_k = sum_i z_ik f_i / sum_i z_ik.

    A class whose total mass falls below 1e-12 keeps its previous mean and a
    warning is recorded; dividing by ~0 is the alternative.
    """
    f = as_float_matrix(features, "features")
    z = as_float_matrix(z, "assignments")
    if f.shape[0] != z.shape[0]:
        raise DimensionError("features and assignments disagree on N")
    mass = z.sum(axis=0)
    empty = mass < EMPTY_CLASS_TOL
    if empty.any() and mu_prev is None:
        raise EmptyClassError(f"classes {np.flatnonzero(empty).tolist()} have no mass")
    weighted = z.T @ f
    mu = np.empty_like(weighted)
    ok = ~empty
    mu[ok] = weighted[ok] / mass[ok, None]
    if empty.any():
        mu[empty] = np.asarray(mu_prev, dtype=np.float64)[empty]
        warnings.warn(
            f"kept previous means for empty classes {np.flatnonzero(empty).tolist()}",
            EmptyClassWarning,
            stacklevel=2,
        )
    return mu


def update_sigma(features: np.ndarray, z: np.ndarray, mu: np.ndarray, floor: float = VARIANCE_FLOOR) -> np.ndarray:
    """Shared diagonal variances: sigma_m = sum_ik z_ik (f_im - mu_km)^2 / N.

    Entries are clipped at the documented floor so the inverse always exists.
    """
    f = as_float_matrix(features, "features")
    z = as_float_matrix(z, "assignments")
    mu = as_float_matrix(mu, "mu")
    if f.shape[0] != z.shape[0]:
        raise DimensionError("features and assignments disagree on N")
    if z.shape[1] != mu.shape[0]:
        raise DimensionError("assignments and mu disagree on K")
    check_same_dim(f, mu, "features", "mu")
    n = f.shape[0]
    acc = np.zeros(f.shape[1], dtype=np.float64)
    buf = np.empty_like(f)
    for k in range(mu.shape[0]):
        np.subtract(f, mu[k], out=buf)
        np.multiply(buf, buf, out=buf)
        acc += z[:, k] @ buf
    return np.maximum(acc / n, floor)

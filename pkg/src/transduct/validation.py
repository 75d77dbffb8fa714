"""Input validation helpers shared by the estimator, solver, and IO layers."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionError, NotNormalizedError

# Rows whose norm is already this close to 1 are left untouched by
# l2_normalize; keeps normalization exactly idempotent (accumulated rounding
# of a unit row is ~sqrt(d) * 2^-53, well below this).
UNIT_NORM_SKIP_TOL = 1e-12

# Loader/solver tolerance for declaring rows unit-norm.
UNIT_NORM_TOL = 1e-5


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row and column."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={X.ndim}")
    n, d = X.shape
    if n < 1 or d < 1:
        raise DimensionError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise DimensionError(f"{name} contains NaN or Inf values")
    return X


def check_same_dim(a: np.ndarray, b: np.ndarray, a_name: str, b_name: str) -> None:
    if a.shape[1] != b.shape[1]:
        raise DimensionError(
            f"{a_name} has d={a.shape[1]} but {b_name} has d={b.shape[1]}"
        )


def check_unit_rows(X: np.ndarray, name: str, tol: float = UNIT_NORM_TOL) -> None:
    norms = np.linalg.norm(X, axis=1)
    worst = float(np.abs(norms - 1.0).max())
    if worst > tol:
        raise NotNormalizedError(
            f"{name} rows must be L2-normalized (worst |norm-1| = {worst:.3g})"
        )


def row_sums_close_to_one(Z: np.ndarray, tol: float = 1e-6) -> bool:
    return bool(np.abs(Z.sum(axis=1) - 1.0).max() <= tol)


def check_simplex(Z: np.ndarray, name: str = "assignments", tol: float = 1e-6) -> np.ndarray:
    """Validate an N x K row-stochastic matrix."""
    Z = as_float_matrix(Z, name)
    if Z.min() < 0.0 or Z.max() > 1.0 + tol:
        raise DimensionError(f"{name} entries must lie in [0, 1]")
    if not row_sums_close_to_one(Z, tol):
        raise DimensionError(f"{name} rows must sum to 1 within {tol}")
    return Z


def check_temperature(tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau) or tau <= 0.0:
        raise ConfigError(f"temperature must be a positive finite real, got {tau}")
    return tau

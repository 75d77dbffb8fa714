"""Nonnegative affinity graphs over query-set embeddings.

Three modes:

* ``gram``: raw pairwise dot products (cosines for unit rows), dense.
* ``clamped``: dot products clamped at zero, dense.
* ``knn``: per-row exact top-k cosines (self excluded), clamped at zero,
  symmetrized with the elementwise maximum; stored sparse, zero diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._blocks import run_blocks
from .errors import DimensionError, InvalidKError, TooLargeError
from .validation import as_float_matrix

MODES = ("gram", "clamped", "knn")
PSD_GUARD_N = 4096


@dataclass(frozen=True)
class AffinityGraph:
    """Immutable pairwise weights, dense ndarray or CSR matrix."""

    weights: object
    mode: str
    symmetric: bool = True
    has_negative: bool = field(default=False)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.weights)

    def propagate(self, z: np.ndarray, threads: int = 1) -> np.ndarray:
        """Weighted neighborhood sum W @ z over fixed row blocks."""
        out = np.empty((self.n, z.shape[1]), dtype=np.float64)
        w = self.weights

        def fill(start: int, stop: int) -> None:
            out[start:stop] = w[start:stop] @ z

        run_blocks(self.n, fill, threads)
        return out

    def dense(self) -> np.ndarray:
        return self.weights.toarray() if self.is_sparse else self.weights


def _gram(features: np.ndarray, threads: int) -> np.ndarray:
    n = features.shape[0]
    w = np.empty((n, n), dtype=np.float64)

    def fill(start: int, stop: int) -> None:
        w[start:stop] = features[start:stop] @ features.T

    run_blocks(n, fill, threads)
    # Compute each pair once and mirror: symmetric to the last bit.
    upper = np.triu(w)
    return upper + np.triu(w, 1).T


def _topk_indices(sims: np.ndarray, k: int):
    """Exact per-row top-k with ties broken toward the lower column index."""
    block = sims.shape[0]
    cols = np.empty((block, k), dtype=np.int64)
    vals = np.empty((block, k), dtype=np.float64)
    # kth largest value per row bounds the candidate set; ties at the
    # boundary are resolved by a deterministic (value desc, index asc) sort.
    kth = -np.partition(-sims, k - 1, axis=1)[:, k - 1]
    for r in range(block):
        cand = np.flatnonzero(sims[r] >= kth[r])
        order = np.lexsort((cand, -sims[r, cand]))[:k]
        chosen = cand[order]
        cols[r] = chosen
        vals[r] = sims[r, chosen]
    return cols, vals


def _symmetrize_max(rows, cols, vals, n: int) -> sp.csr_matrix:
    """Union of (i,j) and (j,i) edges with the larger weight, zeros kept."""
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    v = np.concatenate([vals, vals])
    key = r * np.int64(n) + c
    order = np.argsort(key, kind="stable")
    key, v = key[order], v[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    merged = np.maximum.reduceat(v, starts)
    kept = key[starts]
    return sp.csr_matrix((merged, (kept // n, kept % n)), shape=(n, n))


def build_affinity(features: np.ndarray, mode: str = "clamped", k_neighbors: int | None = 3, threads: int = 1) -> AffinityGraph:
    """Build the affinity graph for unit-norm feature rows."""
    f = as_float_matrix(features, "features")
    if mode not in MODES:
        raise DimensionError(f"unknown affinity mode {mode!r}")
    n = f.shape[0]

    if mode in ("gram", "clamped"):
        w = _gram(f, threads)
        if mode == "clamped":
            np.maximum(w, 0.0, out=w)
            return AffinityGraph(w, mode)
        return AffinityGraph(w, mode, has_negative=bool(w.min() < 0.0))

    if k_neighbors is None or int(k_neighbors) != k_neighbors or k_neighbors < 1:
        raise InvalidKError(f"k_neighbors must be a positive integer, got {k_neighbors!r}")
    # A query set smaller than k+1 simply has fewer neighbors available.
    k = min(int(k_neighbors), n - 1)
    if k == 0:
        return AffinityGraph(sp.csr_matrix((n, n), dtype=np.float64), mode)

    cols = np.empty((n, k), dtype=np.int64)
    vals = np.empty((n, k), dtype=np.float64)

    def fill(start: int, stop: int) -> None:
        sims = f[start:stop] @ f.T
        sims[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        c, v = _topk_indices(sims, k)
        cols[start:stop] = c
        vals[start:stop] = v

    run_blocks(n, fill, threads)
    np.maximum(vals, 0.0, out=vals)
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    w = _symmetrize_max(rows, cols.ravel(), vals.ravel(), n)
    return AffinityGraph(w, mode)


def psd_check(graph: AffinityGraph, tolerance: float = 1e-9):
    """Return (is_psd, smallest eigenvalue) via a symmetric eigensolve.

    Intended for tests and diagnostics, not the solver hot path.
    """
    if graph.n > PSD_GUARD_N:
        raise TooLargeError(f"N={graph.n} exceeds densification guard {PSD_GUARD_N}")
    dense = graph.dense()
    dense = 0.5 * (dense + dense.T)  # eigvalsh wants exact symmetry
    smallest = float(np.linalg.eigvalsh(dense)[0])
    return smallest >= -tolerance, smallest

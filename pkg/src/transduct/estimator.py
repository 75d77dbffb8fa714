"""Scikit-learn style front end for the transductive labeler."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .io import ClassEmbeddings, EmbeddingMatrix, l2_normalize
from .pseudo_labels import compute_pseudo_labels
from .solver import SolverConfig, predict, solve
from .validation import as_float_matrix


class TransductiveZeroShotClassifier(BaseEstimator):
    """Jointly label a whole query set of embeddings against class prototypes.

    The estimator is transductive: ``fit`` consumes the full query set and
    produces labels for exactly those samples. Initial per-sample predictions
    come from temperature-scaled similarities to the class embeddings; the
    solver then refines them with a Gaussian-mixture model of the feature
    space and an affinity graph that rewards similar samples for agreeing.

    Parameters
    ----------
    class_embeddings : array of shape (K, d)
        One text prototype per class. Rows are L2-normalized when
        ``normalize`` is true.
    tau : float, default=100.0
        Softmax temperature for the initial predictions (the CLIP-family
        pretraining logit scale).
    affinity_mode : {"auto", "gram", "clamped", "knn"}, default="auto"
        "auto" picks clamped dense up to 8192 samples, then knn.
    k_neighbors : int, default=3
        Neighbors per sample in knn mode.
    max_outer_iters, inner_z_iters : int
        Loop bounds of the block-coordinate solver.
    z_tolerance : float, default=1e-6
        Early-exit threshold on the max-abs assignment change per outer
        iteration.
    top_m_init : int, default=8
        Number of most confident samples averaged into each initial mean.
    z_update : {"standard", "descent"}, default="standard"
        Assignment update rule; see the solver module.
    gmm_weight_in_z_update : 1 or "1/N", default=1
        Weight of the log-density inside the standard update.
    normalize : bool, default=True
        L2-normalize inputs before solving.
    threads : int, default=1
        Row-block parallelism; results are identical for any value.

    Attributes
    ----------
    pseudo_labels_ : ndarray of shape (N, K)
        Initial text-only predictions.
    assignments_ : ndarray of shape (N, K)
        Final row-stochastic assignments.
    labels_ : ndarray of shape (N,)
        Argmax of ``assignments_``.
    confidence_ : ndarray of shape (N,)
        Probability of the predicted class per sample.
    trace_ : SolverTrace
        Per-iteration objective values and flags.
    """

    def __init__(self, class_embeddings=None, tau=100.0, affinity_mode="auto",
                 k_neighbors=3, max_outer_iters=10, inner_z_iters=3,
                 z_tolerance=1e-6, top_m_init=8, z_update="standard",
                 gmm_weight_in_z_update=1, normalize=True, threads=1):
        self.class_embeddings = class_embeddings
        self.tau = tau
        self.affinity_mode = affinity_mode
        self.k_neighbors = k_neighbors
        self.max_outer_iters = max_outer_iters
        self.inner_z_iters = inner_z_iters
        self.z_tolerance = z_tolerance
        self.top_m_init = top_m_init
        self.z_update = z_update
        self.gmm_weight_in_z_update = gmm_weight_in_z_update
        self.normalize = normalize
        self.threads = threads

    def _solver_config(self) -> SolverConfig:
        return SolverConfig(
            tau=self.tau,
            affinity_mode=self.affinity_mode,
            k_neighbors=self.k_neighbors,
            max_outer_iters=self.max_outer_iters,
            inner_z_iters=self.inner_z_iters,
            z_tolerance=self.z_tolerance,
            top_m_init=self.top_m_init,
            z_update=self.z_update,
            gmm_weight_in_z_update=self.gmm_weight_in_z_update,
            threads=self.threads,
        )

    @staticmethod
    def _unwrap(arr):
        if isinstance(arr, (EmbeddingMatrix, ClassEmbeddings)):
            return arr.data
        return arr

    def fit(self, X, y=None):
        """Solve the joint labeling problem for the query set X."""
        if self.class_embeddings is None:
            raise ValueError("class_embeddings must be provided")
        f = as_float_matrix(self._unwrap(X), "X")
        t = as_float_matrix(self._unwrap(self.class_embeddings), "class_embeddings")
        if self.normalize:
            f = l2_normalize(f)
            t = l2_normalize(t)
        config = self._solver_config()
        z, trace = solve(f, t, config)
        self.pseudo_labels_ = compute_pseudo_labels(f, t, config.tau)
        self.assignments_ = z
        self.labels_, self.confidence_ = predict(z)
        self.trace_ = trace
        self.n_features_in_ = f.shape[1]
        self.classes_ = np.arange(t.shape[0], dtype=np.int64)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def predict_proba(self):
        """Final assignments for the fitted query set."""
        self._check_fitted()
        return self.assignments_

    def _check_fitted(self):
        if not hasattr(self, "assignments_"):
            raise NotFittedError("call fit before reading predictions")

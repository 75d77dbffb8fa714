"""Block-coordinate transductive labeling over precomputed embeddings.

One outer iteration performs a fixed number of Jacobi assignment updates
(every row reads only the previous iterate, so rows can be computed in
parallel) followed by the closed-form mean/variance updates. The loop stops
at max_outer_iters or when the max-abs assignment change over a full outer
iteration drops below z_tolerance.

Two assignment update rules are available:

* ``standard`` (default): z_i <- normalize(y_i * exp(g * log p_i + (W z)_i))
  with g = 1 or 1/N. This rule monotonically decreases its own potential
  (log-likelihood term unweighted, pairwise term halved) but not, in
  general, the reported objective below.
* ``descent``: z_i <- normalize(y_i * exp(log p_i / N + 2 (W z)_i)), the
  exact minimize-a-majorizer step for the reported objective; with a PSD
  affinity the traced objective is provably non-increasing.

The traced objective is always

    -(1/N) sum_i z_i . log p_i  -  sum_ij w_ij z_i . z_j  +  sum_i KL(z_i || y_i)
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .affinity import AffinityGraph, build_affinity
from .errors import ConfigError, DimensionError, EmptyClassWarning, NonFiniteObjectiveError, NonFiniteRowError
from .gmm import (
    DEFAULT_TOP_M,
    VARIANCE_FLOOR,
    GmmState,
    init_gmm,
    log_likelihood,
    update_mu,
    update_sigma,
)
from .pseudo_labels import DEFAULT_TAU, compute_pseudo_labels
from .validation import as_float_matrix, check_same_dim, check_simplex, check_unit_rows

AUTO_DENSE_MAX = 8192
Z_UPDATE_VARIANTS = ("standard", "descent")
GMM_WEIGHT_TOKENS = (1, 1.0, "1/N", "1/n")


@dataclass
class SolverConfig:
    """Hyperparameters of the block-coordinate loop; all exposed on the CLI."""

    tau: float = DEFAULT_TAU
    affinity_mode: str = "auto"  # auto: clamped up to 8192 samples, then knn
    k_neighbors: int = 3
    max_outer_iters: int = 10
    inner_z_iters: int = 3
    z_tolerance: float = 1e-6
    top_m_init: int = DEFAULT_TOP_M
    z_update: str = "standard"
    gmm_weight_in_z_update: object = 1  # 1 or "1/N"
    track_objective: bool = True
    threads: int = 1
    seed: int = 0  # reserved for randomized tie-breaking; none by default

    def validate(self) -> None:
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise ConfigError(f"tau must be positive and finite, got {self.tau}")
        if self.affinity_mode not in ("auto", "gram", "clamped", "knn"):
            raise ConfigError(f"unknown affinity_mode {self.affinity_mode!r}")
        if self.k_neighbors < 1:
            raise ConfigError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.max_outer_iters < 1:
            raise ConfigError(f"max_outer_iters must be >= 1, got {self.max_outer_iters}")
        if self.inner_z_iters < 1:
            raise ConfigError(f"inner_z_iters must be >= 1, got {self.inner_z_iters}")
        if not self.z_tolerance > 0:
            raise ConfigError(f"z_tolerance must be > 0, got {self.z_tolerance}")
        if self.top_m_init < 1:
            raise ConfigError(f"top_m_init must be >= 1, got {self.top_m_init}")
        if self.z_update not in Z_UPDATE_VARIANTS:
            raise ConfigError(f"z_update must be one of {Z_UPDATE_VARIANTS}")
        if self.gmm_weight_in_z_update not in GMM_WEIGHT_TOKENS:
            raise ConfigError("gmm_weight_in_z_update must be 1 or '1/N'")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")

    def resolve_affinity_mode(self, n: int) -> str:
        if self.affinity_mode != "auto":
            return self.affinity_mode
        return "clamped" if n <= AUTO_DENSE_MAX else "knn"

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "affinity_mode": self.affinity_mode,
            "k_neighbors": self.k_neighbors,
            "max_outer_iters": self.max_outer_iters,
            "inner_z_iters": self.inner_z_iters,
            "z_tolerance": self.z_tolerance,
            "top_m_init": self.top_m_init,
            "z_update": self.z_update,
            "gmm_weight_in_z_update": str(self.gmm_weight_in_z_update),
            "threads": self.threads,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    gmm_term: float | None
    laplacian_term: float | None
    kl_term: float | None
    objective_total: float | None
    max_z_change: float
    seconds: float

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "gmm_term": self.gmm_term,
            "laplacian_term": self.laplacian_term,
            "kl_term": self.kl_term,
            "objective_total": self.objective_total,
            "max_z_change": self.max_z_change,
            "seconds": self.seconds,
        }


@dataclass
class SolverTrace:
    records: list = field(default_factory=list)
    converged: bool = False
    affinity_seconds: float = 0.0
    solve_seconds: float = 0.0
    variance_floor_hits: int = 0
    empty_class_events: list = field(default_factory=list)

    @property
    def objective_totals(self) -> list:
        return [r.objective_total for r in self.records]

    def flags(self) -> dict:
        return {
            "variance_floor_hits": self.variance_floor_hits,
            "empty_class_events": [list(e) for e in self.empty_class_events],
            "converged": self.converged,
        }

    def as_dict(self) -> dict:
        return {"records": [r.as_dict() for r in self.records], **self.flags()}


def objective_value(features, z, state: GmmState, graph: AffinityGraph, y_hat):
    """Reported objective and its three terms (gmm, laplacian, kl).

    KL uses the convention 0 * log(0/q) = 0; the log-density carries the
    documented constant offset, which cancels in all difference-based checks.
    """
    f = as_float_matrix(features, "features")
    z = as_float_matrix(z, "assignments")
    y = as_float_matrix(y_hat, "pseudo-labels")
    if z.shape != y.shape or z.shape[0] != f.shape[0]:
        raise DimensionError("objective inputs disagree on N or K")
    n = f.shape[0]
    log_p = log_likelihood(f, state)
    gmm_term = -float((z * log_p).sum()) / n
    laplacian_term = -float((z * graph.propagate(z)).sum())
    pos = z > 0.0
    with np.errstate(divide="ignore"):
        log_ratio = np.log(np.where(pos, z, 1.0)) - np.log(np.where(pos, y, 1.0))
    kl_term = float((z * np.where(pos, log_ratio, 0.0)).sum())
    total = gmm_term + laplacian_term + kl_term
    if not np.isfinite(total):
        raise NonFiniteObjectiveError(
            f"objective is not finite (gmm={gmm_term}, laplacian={laplacian_term}, kl={kl_term})"
        )
    return total, (gmm_term, laplacian_term, kl_term)


def z_step(z_prev, log_p, graph: AffinityGraph, y_hat, variant: str = "standard",
           gmm_weight: float = 1.0, threads: int = 1):
    """One Jacobi assignment update; every row reads only z_prev.

    The per-row maximum of the composite log y + weighted log p + neighbor
    pull is subtracted before exponentiation. Zero entries of y_hat stay zero
    under the multiplicative update.
    """
    z_prev = np.asarray(z_prev, dtype=np.float64)
    y = np.asarray(y_hat, dtype=np.float64)
    n = z_prev.shape[0]
    pull = graph.propagate(z_prev, threads)
    if variant == "standard":
        s = gmm_weight * log_p + pull
    elif variant == "descent":
        s = log_p / n + 2.0 * pull
    else:
        raise ConfigError(f"unknown z_update variant {variant!r}")
    with np.errstate(divide="ignore"):
        s += np.log(y)
    row_max = s.max(axis=1, keepdims=True)
    if not np.isfinite(row_max).all():
        raise NonFiniteRowError("assignment update produced a non-finite row")
    np.exp(s - row_max, out=s)
    sums = s.sum(axis=1, keepdims=True)
    if not np.isfinite(sums).all() or sums.min() <= 0.0:
        raise NonFiniteRowError("assignment update produced a degenerate row sum")
    s /= sums
    return s


def solve(features, class_embeddings, config: SolverConfig | None = None,
          z_init=None, inner_hook=None):
    """Run the full transductive loop; returns (assignments, trace).

    With z_init given, the loop warm-starts from that simplex matrix and the
    mixture state is recomputed from it instead of the top-m initialization.
    inner_hook(outer_idx, inner_idx, z) is called after every inner step when
    provided (per-inner-step tracing).

    Deterministic: identical inputs and config produce identical results
    bit for bit, regardless of the thread count.
    """
    config = config or SolverConfig()
    config.validate()
    f = as_float_matrix(features, "features")
    t = as_float_matrix(class_embeddings, "class embeddings")
    check_same_dim(f, t, "features", "class embeddings")
    check_unit_rows(f, "features")
    check_unit_rows(t, "class embeddings")
    n = f.shape[0]

    start = time.perf_counter()
    y_hat = compute_pseudo_labels(f, t, config.tau)

    t_aff = time.perf_counter()
    mode = config.resolve_affinity_mode(n)
    graph = build_affinity(f, mode=mode, k_neighbors=config.k_neighbors, threads=config.threads)
    affinity_seconds = time.perf_counter() - t_aff

    if z_init is None:
        z = y_hat.copy()
        state = init_gmm(f, y_hat, config.top_m_init)
    else:
        z = check_simplex(z_init, "z_init").copy()
        if z.shape != y_hat.shape:
            raise DimensionError("z_init shape must be N x K")
        mu = update_mu(f, z)
        state = GmmState(mu, update_sigma(f, z, mu))

    gmm_weight = 1.0 if config.gmm_weight_in_z_update in (1, 1.0) else 1.0 / n

    trace = SolverTrace(affinity_seconds=affinity_seconds)
    for outer in range(config.max_outer_iters):
        iter_start = time.perf_counter()
        log_p = log_likelihood(f, state)
        z_before = z
        for inner in range(config.inner_z_iters):
            z = z_step(z, log_p, graph, y_hat, config.z_update, gmm_weight, config.threads)
            if inner_hook is not None:
                inner_hook(outer, inner, z)

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", EmptyClassWarning)
            mu = update_mu(f, z, state.mu)
        for w in caught:
            if issubclass(w.category, EmptyClassWarning):
                empty = np.flatnonzero(z.sum(axis=0) < 1e-12)
                trace.empty_class_events.extend((outer, int(c)) for c in empty)
        sigma = update_sigma(f, z, mu)
        if bool((sigma <= VARIANCE_FLOOR).any()):
            trace.variance_floor_hits += 1
        state = GmmState(mu, sigma)

        max_change = float(np.abs(z - z_before).max())
        if config.track_objective:
            total, (gmm_term, lap_term, kl_term) = objective_value(f, z, state, graph, y_hat)
        else:
            total = gmm_term = lap_term = kl_term = None
        trace.records.append(IterationRecord(
            iteration=outer,
            gmm_term=gmm_term,
            laplacian_term=lap_term,
            kl_term=kl_term,
            objective_total=total,
            max_z_change=max_change,
            seconds=time.perf_counter() - iter_start,
        ))
        if max_change < config.z_tolerance:
            trace.converged = True
            break

    trace.solve_seconds = time.perf_counter() - start
    return z, trace


def predict(z):
    """Per-row argmax label (lowest index wins ties) and its probability."""
    z = np.asarray(z, dtype=np.float64)
    labels = np.argmax(z, axis=1).astype(np.int64)
    confidence = z[np.arange(z.shape[0]), labels]
    return labels, confidence

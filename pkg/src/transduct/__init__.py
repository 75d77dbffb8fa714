"""Transductive zero-shot classification on precomputed vision-language embeddings.

Instead of predicting each sample from its text similarities alone, the whole
query set is labeled jointly: a Gaussian-mixture model of the feature space
and an affinity graph over samples refine the text-driven initial
predictions, at a small fraction of the feature-extraction cost.
"""

from .affinity import AffinityGraph, build_affinity, psd_check
from .errors import TransductError
from .estimator import TransductiveZeroShotClassifier
from .evaluate import PredictionReport, build_report, save_report_json, top1_accuracy
from .gmm import GmmState, init_gmm, log_likelihood, update_mu, update_sigma
from .io import (
    ClassEmbeddings,
    EmbeddingMatrix,
    LabelVector,
    l2_normalize,
    load_embeddings,
    save_embeddings,
    save_predictions,
)
from .pseudo_labels import compute_pseudo_labels, ensemble_class_embeddings
from .solver import SolverConfig, SolverTrace, objective_value, predict, solve, z_step

__version__ = "0.1.0"

__all__ = [
    "AffinityGraph",
    "ClassEmbeddings",
    "EmbeddingMatrix",
    "GmmState",
    "LabelVector",
    "PredictionReport",
    "SolverConfig",
    "SolverTrace",
    "TransductError",
    "TransductiveZeroShotClassifier",
    "build_affinity",
    "build_report",
    "compute_pseudo_labels",
    "ensemble_class_embeddings",
    "init_gmm",
    "l2_normalize",
    "load_embeddings",
    "log_likelihood",
    "objective_value",
    "predict",
    "psd_check",
    "save_embeddings",
    "save_predictions",
    "save_report_json",
    "solve",
    "top1_accuracy",
    "update_mu",
    "update_sigma",
    "z_step",
]

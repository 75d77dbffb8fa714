"""Text-driven initial predictions and prompt-ensemble class embeddings."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError
from .io import ClassEmbeddings, l2_normalize
from .validation import as_float_matrix, check_same_dim, check_temperature

DEFAULT_TAU = 100.0  # CLIP-family pretraining logit scale


def ensemble_class_embeddings(prompt_embeddings: Sequence[np.ndarray]) -> ClassEmbeddings:
    """Average each class's prompt embeddings into one unit-norm row.

    prompt_embeddings holds one M x d matrix per class (M may differ across
    classes). The mean is taken first and the result renormalized after.
    """
    if len(prompt_embeddings) < 2:
        raise DimensionError("need at least 2 classes to ensemble")
    mats = [as_float_matrix(m, f"class {i} prompts") for i, m in enumerate(prompt_embeddings)]
    d = mats[0].shape[1]
    for i, m in enumerate(mats):
        if m.shape[1] != d:
            raise DimensionError(f"class {i} prompts have d={m.shape[1]}, expected {d}")
    means = np.stack([m.mean(axis=0) for m in mats])
    return l2_normalize(ClassEmbeddings(means))


def compute_pseudo_labels(features: np.ndarray, class_embeddings: np.ndarray, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Softmax over temperature-scaled image-text similarities.

    Rows of both inputs must be unit-norm so the dot product is the cosine
    similarity. The per-row maximum is subtracted before exponentiation; at
    tau near 100 the raw exponentials would overflow otherwise.
    """
    f = as_float_matrix(features, "features")
    t = as_float_matrix(class_embeddings, "class embeddings")
    check_same_dim(f, t, "features", "class embeddings")
    tau = check_temperature(tau)
    logits = tau * (f @ t.T)
    logits -= logits.max(axis=1, keepdims=True)
    np.exp(logits, out=logits)
    logits /= logits.sum(axis=1, keepdims=True)
    return logits

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def unit_rows(rng, n, d):
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@pytest.fixture
def small_instance(rng):
    """Features, class texts, and pseudo-labels for a 12x3 problem in d=4."""
    from transduct.pseudo_labels import compute_pseudo_labels

    f = unit_rows(rng, 12, 4)
    t = unit_rows(rng, 3, 4)
    y = compute_pseudo_labels(f, t, 5.0)
    return f, t, y

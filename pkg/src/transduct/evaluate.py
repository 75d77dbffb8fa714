"""Top-1 accuracy and the inductive-vs-transductive report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, LengthMismatchError
from .solver import SolverConfig, SolverTrace, predict


def top1_accuracy(pred, truth) -> float:
    """Percentage of samples whose predicted class matches the truth."""
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.ndim != 1 or truth.ndim != 1:
        raise DimensionError("predictions and truth must be 1-D")
    if pred.shape[0] != truth.shape[0]:
        raise LengthMismatchError(
            f"predictions have {pred.shape[0]} entries, truth has {truth.shape[0]}"
        )
    return 100.0 * float(np.mean(pred == truth))


@dataclass
class PredictionReport:
    """Predictions plus the without/with accuracy comparison and run metadata."""

    predictions: np.ndarray
    confidence: np.ndarray
    probabilities: np.ndarray
    inductive_top1: float | None = None
    transductive_top1: float | None = None
    delta: float | None = None
    config: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.probabilities.shape[0]

    def summary_lines(self) -> list:
        """Human-readable lines, accuracies at one decimal place."""
        lines = [f"samples: {self.n}    classes: {self.probabilities.shape[1]}"]
        if self.inductive_top1 is not None:
            lines.append(f"inductive top-1:    {self.inductive_top1:.1f}")
            lines.append(f"transductive top-1: {self.transductive_top1:.1f}")
            lines.append(f"delta:              {self.delta:+.1f}")
        return lines


def build_report(y_hat, z, truth=None, trace: SolverTrace | None = None,
                 config: SolverConfig | None = None, timing: dict | None = None) -> PredictionReport:
    """Package final assignments; accuracies only when truth is supplied."""
    y_hat = np.asarray(y_hat, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if y_hat.shape != z.shape:
        raise DimensionError("pseudo-labels and assignments disagree on shape")
    labels, confidence = predict(z)
    inductive = transductive = delta = None
    if truth is not None:
        truth = np.asarray(truth, dtype=np.int64)
        if truth.shape[0] != z.shape[0]:
            raise LengthMismatchError("truth length does not match sample count")
        inductive_labels, _ = predict(y_hat)
        inductive = top1_accuracy(inductive_labels, truth)
        transductive = top1_accuracy(labels, truth)
        delta = transductive - inductive
    return PredictionReport(
        predictions=labels,
        confidence=confidence,
        probabilities=z,
        inductive_top1=inductive,
        transductive_top1=transductive,
        delta=delta,
        config=config.as_dict() if config is not None else {},
        timing=dict(timing or {}),
        trace=[r.as_dict() for r in trace.records] if trace is not None else [],
        flags=trace.flags() if trace is not None else {},
    )


def save_report_json(report: PredictionReport, path) -> None:
    """Write the JSON report; numbers stay full-precision doubles."""
    payload = {
        "config": report.config,
        "timing": report.timing,
        "inductive_top1": report.inductive_top1,
        "transductive_top1": report.transductive_top1,
        "delta": report.delta,
        "trace": report.trace,
        "flags": report.flags,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_report_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)

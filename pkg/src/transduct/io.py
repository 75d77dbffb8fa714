"""Loading, validation, and saving of embedding tensors and predictions.

Two on-disk formats are accepted:

* RSTE container (authoritative, dependency-free): all integers little-endian.
  Bytes 0-3 magic ``RSTE``; bytes 4-5 version = 1 (u16); byte 6 kind
  (0 = image embeddings, 1 = text class embeddings, 2 = labels) (u8); byte 7
  reserved = 0; bytes 8-15 N (u64); bytes 16-23 d (u64, = 1 for labels);
  payload: N*d little-endian float32 row-major (kinds 0, 1) or N little-endian
  int64 (kind 2). No padding, no trailing bytes.
* NPY v1.0 with a little-endian float32 payload (embeddings) or int64 payload
  (labels), for ecosystem interchange.

Values are stored as 4-byte floats on disk but promoted to 8-byte floats for
all solver arithmetic.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    CorruptPayloadError,
    DimensionError,
    KindMismatchError,
    UnknownFormatError,
    ZeroNormRowError,
)
from .validation import UNIT_NORM_SKIP_TOL, as_float_matrix

if TYPE_CHECKING:
    from .evaluate import PredictionReport

RSTE_MAGIC = b"RSTE"
RSTE_VERSION = 1
_HEADER = struct.Struct("<4sHBBQQ")

KIND_IMAGE = 0
KIND_TEXT = 1
KIND_LABELS = 2
_KIND_NAMES = {"image": KIND_IMAGE, "text": KIND_TEXT, "labels": KIND_LABELS}

NPY_MAGIC = b"\x93NUMPY"


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x d query-set image features, float64 in memory."""

    data: np.ndarray
    normalized: bool = False

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ClassEmbeddings:
    """K x d per-class text features, float64 in memory."""

    data: np.ndarray
    normalized: bool = False

    @property
    def k(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Length-N ground-truth class indices, used for evaluation only."""

    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.labels.shape[0]


def _normalize_rows(data: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1)
    if norms.min() < 1e-12:
        row = int(np.argmin(norms))
        raise ZeroNormRowError(f"row {row} has L2 norm {norms[row]:.3g}")
    out = data.copy()
    # Skip rows already at unit norm so normalization is exactly idempotent.
    needs = np.abs(norms - 1.0) >= UNIT_NORM_SKIP_TOL
    out[needs] /= norms[needs, None]
    return out


def l2_normalize(m):
    """Divide each row by its L2 norm; accepts a wrapper type or raw array."""
    if isinstance(m, EmbeddingMatrix):
        return EmbeddingMatrix(_normalize_rows(m.data), normalized=True)
    if isinstance(m, ClassEmbeddings):
        return ClassEmbeddings(_normalize_rows(m.data), normalized=True)
    return _normalize_rows(as_float_matrix(m))


def _read_rste(raw: bytes, path: str):
    if len(raw) < _HEADER.size:
        raise CorruptPayloadError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, kind, reserved, n, d = _HEADER.unpack_from(raw)
    if version != RSTE_VERSION:
        raise UnknownFormatError(f"{path}: unsupported RSTE version {version}")
    if kind not in (KIND_IMAGE, KIND_TEXT, KIND_LABELS):
        raise CorruptPayloadError(f"{path}: unknown kind byte {kind}")
    if reserved != 0:
        raise CorruptPayloadError(f"{path}: reserved byte must be 0, got {reserved}")
    if n == 0 or d == 0:
        raise DimensionError(f"{path}: header declares N={n}, d={d}")
    payload = raw[_HEADER.size:]
    if kind == KIND_LABELS:
        if d != 1:
            raise CorruptPayloadError(f"{path}: labels require d=1, got d={d}")
        expected = n * 8
        if len(payload) != expected:
            raise CorruptPayloadError(
                f"{path}: payload is {len(payload)} bytes, header implies {expected}"
            )
        values = np.frombuffer(payload, dtype="<i8").astype(np.int64)
        if values.min() < 0:
            raise CorruptPayloadError(f"{path}: labels must be nonnegative")
        return kind, values
    expected = n * d * 4
    if len(payload) != expected:
        raise CorruptPayloadError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(n, d)
    if not np.isfinite(values).all():
        raise CorruptPayloadError(f"{path}: payload contains NaN or Inf")
    return kind, values


def _read_npy(raw: bytes, path: str):
    import io as _io

    try:
        arr = np.load(_io.BytesIO(raw), allow_pickle=False)
    except (ValueError, EOFError) as exc:
        raise CorruptPayloadError(f"{path}: bad NPY file ({exc})") from exc
    if arr.dtype == np.dtype("<f4") and arr.ndim == 2:
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DimensionError(f"{path}: empty array shape {arr.shape}")
        values = np.ascontiguousarray(arr, dtype=np.float64)
        if not np.isfinite(values).all():
            raise CorruptPayloadError(f"{path}: payload contains NaN or Inf")
        # image or text is decided by the caller's expectation
        return None, values
    if arr.dtype == np.dtype("<i8") and arr.ndim == 1:
        if arr.shape[0] == 0:
            raise DimensionError(f"{path}: empty label vector")
        if arr.min() < 0:
            raise CorruptPayloadError(f"{path}: labels must be nonnegative")
        return KIND_LABELS, arr.astype(np.int64)
    raise UnknownFormatError(
        f"{path}: unsupported NPY dtype/shape {arr.dtype}/{arr.shape} "
        "(need <f4 2-D embeddings or <i8 1-D labels)"
    )


def load_embeddings(path, expected_kind: str, normalize: bool = True):
    """Load one tensor file and return the validated wrapper object.

    expected_kind is one of "image", "text", or "labels". Embedding rows are
    L2-normalized on load unless normalize=False.
    """
    if expected_kind not in _KIND_NAMES:
        raise ValueError(f"expected_kind must be image/text/labels, got {expected_kind!r}")
    want = _KIND_NAMES[expected_kind]
    path = str(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] == RSTE_MAGIC:
        kind, values = _read_rste(raw, path)
    elif raw[: len(NPY_MAGIC)] == NPY_MAGIC:
        kind, values = _read_npy(raw, path)
    else:
        raise UnknownFormatError(f"{path}: unrecognized magic {raw[:4]!r}")

    if kind is None:
        kind = want if want in (KIND_IMAGE, KIND_TEXT) else KIND_IMAGE
    if kind != want:
        raise KindMismatchError(f"{path}: file holds kind {kind}, expected {expected_kind}")

    if want == KIND_LABELS:
        return LabelVector(values)
    if want == KIND_TEXT:
        if values.shape[0] < 2:
            raise DimensionError(f"{path}: class embeddings need K >= 2, got {values.shape[0]}")
        obj = ClassEmbeddings(values)
    else:
        obj = EmbeddingMatrix(values)
    return l2_normalize(obj) if normalize else obj


def load_prompt_matrix(path) -> np.ndarray:
    """Load one class's M x d prompt-embedding matrix (M >= 1 allowed).

    Accepts RSTE kind-1 files or NPY float matrices; no normalization.
    """
    path = str(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] == RSTE_MAGIC:
        kind, values = _read_rste(raw, path)
        if kind != KIND_TEXT:
            raise KindMismatchError(f"{path}: expected text embeddings, got kind {kind}")
        return values
    if raw[: len(NPY_MAGIC)] == NPY_MAGIC:
        kind, values = _read_npy(raw, path)
        if kind == KIND_LABELS:
            raise KindMismatchError(f"{path}: expected text embeddings, got labels")
        return values
    raise UnknownFormatError(f"{path}: unrecognized magic {raw[:4]!r}")


def save_embeddings(obj, path, kind: str | None = None) -> None:
    """Write an embedding matrix or label vector to RSTE (or NPY by extension)."""
    path = str(path)
    if isinstance(obj, LabelVector) or kind == "labels":
        labels = obj.labels if isinstance(obj, LabelVector) else np.asarray(obj, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] == 0:
            raise DimensionError("label vector must be 1-D and non-empty")
        if path.endswith(".npy"):
            np.save(path, labels.astype("<i8"))
            return
        header = _HEADER.pack(RSTE_MAGIC, RSTE_VERSION, KIND_LABELS, 0, labels.shape[0], 1)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(labels.astype("<i8").tobytes())
        return

    if isinstance(obj, ClassEmbeddings):
        data, byte_kind = obj.data, KIND_TEXT
    elif isinstance(obj, EmbeddingMatrix):
        data, byte_kind = obj.data, KIND_IMAGE
    else:
        data = as_float_matrix(obj, "embeddings")
        byte_kind = _KIND_NAMES.get(kind or "image", KIND_IMAGE)
    payload = data.astype("<f4")
    if path.endswith(".npy"):
        np.save(path, payload)
        return
    n, d = payload.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(RSTE_MAGIC, RSTE_VERSION, byte_kind, 0, n, d))
        fh.write(payload.tobytes())


def save_predictions(report: "PredictionReport", path) -> None:
    """Write the predictions CSV: index,pred,confidence,p_0,...,p_{K-1}.

    Probabilities are formatted with 6 decimal places.
    """
    probs = report.probabilities
    k = probs.shape[1]
    header = ["index", "pred", "confidence"] + [f"p_{j}" for j in range(k)]
    lines = [",".join(header)]
    for i in range(probs.shape[0]):
        row = [str(i), str(int(report.predictions[i])), f"{report.confidence[i]:.6f}"]
        row.extend(f"{p:.6f}" for p in probs[i])
        lines.append(",".join(row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_predictions(path):
    """Read back a predictions CSV; returns (indices, preds, confidence, probs)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["index", "pred", "confidence"]:
        raise UnknownFormatError(f"{path}: not a predictions CSV")
    body = rows[1:]
    indices = np.array([int(r[0]) for r in body], dtype=np.int64)
    preds = np.array([int(r[1]) for r in body], dtype=np.int64)
    conf = np.array([float(r[2]) for r in body], dtype=np.float64)
    probs = np.array([[float(v) for v in r[3:]] for r in body], dtype=np.float64)
    return indices, preds, conf, probs

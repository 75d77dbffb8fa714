"""Atomic emission of RSTE / NPY tensor files.

The RSTE layout (all integers little-endian): magic ``RSTE``; u16 version 1;
u8 kind (0 image embeddings, 1 text embeddings, 2 labels); u8 reserved 0;
u64 N; u64 d (1 for labels); payload of N*d float32 values row-major, or N
int64 values for labels. This writer is self-contained so the adapter stays
a pure producer for the solver package.
"""

from __future__ import annotations

import hashlib
import io
import os
import struct

import numpy as np

_HEADER = struct.Struct("<4sHBBQQ")
KIND_IMAGE, KIND_TEXT, KIND_LABELS = 0, 1, 2


def _atomic_write(path, payload: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.save(buf, arr)
    return buf.getvalue()


def write_embeddings(path, data: np.ndarray, kind: int) -> None:
    data = np.ascontiguousarray(data, dtype="<f4")
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError(f"embeddings must be a non-empty 2-D array, got {data.shape}")
    if str(path).endswith(".npy"):
        _atomic_write(path, _npy_bytes(data))
        return
    n, d = data.shape
    header = _HEADER.pack(b"RSTE", 1, kind, 0, n, d)
    _atomic_write(path, header + data.tobytes())


def write_labels(path, labels) -> None:
    labels = np.ascontiguousarray(labels, dtype="<i8")
    if labels.ndim != 1 or labels.shape[0] == 0:
        raise ValueError("labels must be a non-empty 1-D array")
    if str(path).endswith(".npy"):
        _atomic_write(path, _npy_bytes(labels))
        return
    header = _HEADER.pack(b"RSTE", 1, KIND_LABELS, 0, labels.shape[0], 1)
    _atomic_write(path, header + labels.tobytes())


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()

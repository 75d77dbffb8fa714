"""The extraction run: encode a dataset and its class prompts, emit files.

The adapter is a pure producer: it never computes predictions. Emitted
files are consumed by the solver package through its documented formats.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .dataset import list_images
from .encoder import ClipEncoder
from .errors import EncodingError
from .manifest import ExtractionManifest
from .writer import KIND_IMAGE, KIND_TEXT, sha256_of, write_embeddings, write_labels


def _l2_normalize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x.astype(np.float64), axis=1, keepdims=True)
    if norms.min() < 1e-12:
        raise EncodingError("encoder produced a zero-norm embedding row")
    return (x / norms).astype(np.float32)


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


def extract(manifest: ExtractionManifest, encoder: ClipEncoder | None = None) -> dict:
    """Run one extraction; returns the sidecar dict (also written to disk).

    Emits, under manifest.output_dir:

    * ``images.<ext>``  image embeddings (kind 0), L2-normalized
    * ``prompts_<idx>_<class>.<ext>``  per-class prompt embeddings (kind 1)
    * ``texts.<ext>``  ensembled class embeddings (kind 1)
    * ``labels.<ext>``  integer class indices (kind 2)
    * ``sidecar.json``  model, tau, dataset, n, d, k, per-file sha256
    """
    out_dir = Path(manifest.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = manifest.output_format

    if encoder is None:
        encoder = ClipEncoder(manifest.model, manifest.device)
    tau = manifest.tau_override if manifest.tau_override is not None else encoder.tau

    paths, labels = list_images(manifest.dataset_root, manifest.class_names)
    image_feats = _l2_normalize(encoder.encode_images(paths, manifest.batch_size))

    prompt_files = {}
    ensembled = np.empty((len(manifest.class_names), image_feats.shape[1]), dtype=np.float32)
    for idx, name in enumerate(manifest.class_names):
        prompts = manifest.prompts_for(name)
        feats = _l2_normalize(encoder.encode_texts(prompts, manifest.batch_size))
        prompt_path = out_dir / f"prompts_{idx:03d}_{_slug(name)}.{ext}"
        write_embeddings(prompt_path, feats, KIND_TEXT)
        prompt_files[name] = prompt_path
        mean = feats.astype(np.float64).mean(axis=0, keepdims=True)
        ensembled[idx] = _l2_normalize(mean)[0]

    images_path = out_dir / f"images.{ext}"
    texts_path = out_dir / f"texts.{ext}"
    labels_path = out_dir / f"labels.{ext}"
    write_embeddings(images_path, image_feats, KIND_IMAGE)
    write_embeddings(texts_path, ensembled, KIND_TEXT)
    write_labels(labels_path, np.asarray(labels, dtype=np.int64))

    sidecar = {
        "model": manifest.model,
        "architecture": manifest.architecture,
        "tau": float(tau),
        "dataset": manifest.dataset_name,
        "n": int(image_feats.shape[0]),
        "d": int(image_feats.shape[1]),
        "k": len(manifest.class_names),
        "templates": len(manifest.templates),
        "sha256": {
            "images": sha256_of(images_path),
            "texts": sha256_of(texts_path),
            "labels": sha256_of(labels_path),
            **{f"prompts/{name}": sha256_of(p) for name, p in prompt_files.items()},
        },
        "files": {
            "images": str(images_path),
            "texts": str(texts_path),
            "labels": str(labels_path),
            "prompts": {name: str(p) for name, p in prompt_files.items()},
        },
    }
    sidecar_path = out_dir / "sidecar.json"
    tmp = sidecar_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(sidecar, indent=2) + "\n")
    tmp.replace(sidecar_path)
    return sidecar

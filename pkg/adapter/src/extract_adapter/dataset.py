"""Folder-per-class dataset listing with deterministic ordering."""

from __future__ import annotations

from pathlib import Path

from .errors import DatasetLayoutError

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".webp"}


def list_images(root, class_names):
    """Return (paths, labels) over all classes.

    Classes are visited in manifest order and files in sorted-name order, so
    the emitted row order is reproducible.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetLayoutError(f"dataset root {root} is not a directory")
    paths = []
    labels = []
    for idx, name in enumerate(class_names):
        class_dir = root / name
        if not class_dir.is_dir():
            raise DatasetLayoutError(f"missing class directory {class_dir}")
        files = sorted(
            p for p in class_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
        )
        if not files:
            raise DatasetLayoutError(f"class directory {class_dir} holds no images")
        paths.extend(files)
        labels.extend([idx] * len(files))
    return paths, labels

"""Bridge from raw scene-classification datasets to solver-ready embedding files."""

from .encoder import ClipEncoder
from .errors import (
    AdapterError,
    DatasetLayoutError,
    EncodingError,
    ManifestError,
    ModelUnavailableError,
)
from .extract import extract
from .manifest import ExtractionManifest

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "ClipEncoder",
    "DatasetLayoutError",
    "EncodingError",
    "ExtractionManifest",
    "ManifestError",
    "ModelUnavailableError",
    "extract",
]

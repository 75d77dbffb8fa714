"""Adapter error types."""


class AdapterError(Exception):
    """Base class for extraction errors."""


class ModelUnavailableError(AdapterError):
    """Checkpoint could not be loaded from the given path or identifier."""


class DatasetLayoutError(AdapterError):
    """Dataset folder structure does not match the manifest's class list."""


class EncodingError(AdapterError):
    """The model failed while encoding images or prompts."""


class ManifestError(AdapterError, ValueError):
    """Manifest violates its invariants."""

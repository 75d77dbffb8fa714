"""Extraction manifest: what to encode, with what, and where to put it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestError

DEFAULT_TEMPLATES = Path(__file__).parent / "templates" / "remote_sensing.txt"


def load_templates(path) -> list[str]:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    templates = [ln for ln in lines if ln and not ln.startswith("#")]
    if not templates:
        raise ManifestError(f"{path}: no templates found")
    return templates


@dataclass
class ExtractionManifest:
    """Inputs and outputs of one extraction run.

    model is a local checkpoint directory or a hub identifier; architecture
    is a free-form tag recorded in the sidecar (e.g. "ViT-B/32").
    """

    model: str
    dataset_name: str
    dataset_root: str
    class_names: list
    output_dir: str
    architecture: str = ""
    templates: list = field(default_factory=list)
    templates_file: str | None = None
    output_format: str = "rste"  # or "npy"
    batch_size: int = 32
    device: str = "cpu"
    tau_override: float | None = None  # normally read from the checkpoint

    def __post_init__(self):
        if len(self.class_names) < 2:
            raise ManifestError(f"need at least 2 classes, got {len(self.class_names)}")
        if not self.templates:
            source = self.templates_file or DEFAULT_TEMPLATES
            self.templates = load_templates(source)
        if len(self.templates) < 1:
            raise ManifestError("need at least 1 prompt template")
        if self.output_format not in ("rste", "npy"):
            raise ManifestError(f"output_format must be rste or npy, got {self.output_format!r}")
        if self.batch_size < 1:
            raise ManifestError("batch_size must be >= 1")
        if self.tau_override is not None and not self.tau_override > 0:
            raise ManifestError("tau_override must be positive")

    @classmethod
    def from_json(cls, path) -> "ExtractionManifest":
        with open(path) as fh:
            raw = json.load(fh)
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ManifestError(f"{path}: {exc}") from exc

    def prompts_for(self, class_name: str) -> list:
        """Fill every template with the class name (underscores become spaces)."""
        human = class_name.replace("_", " ")
        return [t.format(human) for t in self.templates]

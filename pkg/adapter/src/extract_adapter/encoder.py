"""CLIP-family checkpoint wrapper: batched image and text encoding."""

from __future__ import annotations

import numpy as np

from .errors import EncodingError, ModelUnavailableError


def _unwrap(out):
    # transformers >= 5 returns a pooling output whose pooler_output holds
    # the projected features; earlier versions return the tensor directly
    return out.pooler_output if hasattr(out, "pooler_output") else out


class ClipEncoder:
    """Loads a CLIP checkpoint and exposes encode_images / encode_texts.

    The checkpoint's learned logit scale is exposed as ``tau``.
    """

    def __init__(self, model_name_or_path: str, device: str = "cpu"):
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:  # pragma: no cover
            raise ModelUnavailableError(f"torch/transformers unavailable: {exc}") from exc
        self._torch = torch
        try:
            self.model = CLIPModel.from_pretrained(model_name_or_path).to(device).eval()
            self.processor = CLIPProcessor.from_pretrained(model_name_or_path)
        except (OSError, EnvironmentError, ValueError) as exc:
            raise ModelUnavailableError(
                f"cannot load checkpoint {model_name_or_path!r}: {exc}"
            ) from exc
        self.device = device

    @property
    def tau(self) -> float:
        return float(self.model.logit_scale.exp().item())

    @property
    def dim(self) -> int:
        return int(self.model.config.projection_dim)

    def encode_images(self, paths, batch_size: int = 32) -> np.ndarray:
        from PIL import Image

        torch = self._torch
        chunks = []
        try:
            with torch.no_grad():
                for start in range(0, len(paths), batch_size):
                    batch = []
                    for p in paths[start:start + batch_size]:
                        with Image.open(p) as img:
                            batch.append(img.convert("RGB"))
                    inputs = self.processor(images=batch, return_tensors="pt")
                    feats = _unwrap(self.model.get_image_features(
                        pixel_values=inputs["pixel_values"].to(self.device)
                    ))
                    chunks.append(feats.cpu().numpy().astype(np.float32))
        except (OSError, RuntimeError, ValueError) as exc:
            raise EncodingError(f"image encoding failed: {exc}") from exc
        return np.concatenate(chunks, axis=0)

    def encode_texts(self, prompts, batch_size: int = 64) -> np.ndarray:
        torch = self._torch
        chunks = []
        try:
            with torch.no_grad():
                for start in range(0, len(prompts), batch_size):
                    batch = list(prompts[start:start + batch_size])
                    inputs = self.processor(
                        text=batch, return_tensors="pt", padding=True, truncation=True
                    )
                    feats = _unwrap(self.model.get_text_features(
                        input_ids=inputs["input_ids"].to(self.device),
                        attention_mask=inputs["attention_mask"].to(self.device),
                    ))
                    chunks.append(feats.cpu().numpy().astype(np.float32))
        except (RuntimeError, ValueError) as exc:
            raise EncodingError(f"text encoding failed: {exc}") from exc
        return np.concatenate(chunks, axis=0)

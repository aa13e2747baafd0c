"""Pretrained-model embedders for metaphor phrases and robot images.

Both embedders run in inference mode with batch size 1, so outputs are
deterministic for a fixed checkpoint and input.  Output dimension is never
assumed; it is whatever the checkpoint emits.
"""

from __future__ import annotations

import numpy as np
import torch
from PIL import Image
from transformers import AutoImageProcessor, AutoModel, AutoTokenizer

from .assets import AssetError, RawRobotAsset

#: Documented defaults: a standard pretrained text transformer and an
#: ImageNet-21k-pretrained vision transformer.
DEFAULT_TEXT_MODEL = "bert-base-uncased"
DEFAULT_VISION_MODEL = "google/vit-base-patch16-224-in21k"


class TextEmbedder:
    """Sentence embeddings from a pretrained text transformer."""

    def __init__(self, model_id: str = DEFAULT_TEXT_MODEL):
        self.model_id = model_id
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise AssetError(f"cannot load text model {model_id!r}: {exc}") from exc
        self.model.eval()

    def embed_phrase(self, phrase: str) -> np.ndarray:
        if not phrase.strip():
            raise AssetError("empty metaphor phrase")
        inputs = self.tokenizer(phrase, return_tensors="pt")
        with torch.no_grad():
            outputs = self.model(**inputs)
        pooled = getattr(outputs, "pooler_output", None)
        if pooled is None:
            pooled = outputs.last_hidden_state[:, 0]  # fall back to the CLS token
        return pooled[0].numpy().astype(np.float64)

    def embed_metaphors(self, asset: RawRobotAsset) -> np.ndarray:
        """Per-phrase pooled vectors averaged into one robot-level vector."""
        vectors = [self.embed_phrase(p) for p in asset.metaphors]
        return np.mean(vectors, axis=0)


class ImageEmbedder:
    """Class-token features from a pretrained vision transformer."""

    def __init__(self, model_id: str = DEFAULT_VISION_MODEL):
        self.model_id = model_id
        try:
            self.processor = AutoImageProcessor.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise AssetError(f"cannot load vision model {model_id!r}: {exc}") from exc
        self.model.eval()

    def embed_image(self, asset: RawRobotAsset) -> np.ndarray:
        try:
            with Image.open(asset.image_path) as img:
                rgb = img.convert("RGB")
        except OSError as exc:
            raise AssetError(f"id {asset.id!r}: cannot decode "
                             f"{asset.image_path}: {exc}") from None
        inputs = self.processor(images=rgb, return_tensors="pt")
        with torch.no_grad():
            outputs = self.model(**inputs)
        pooled = getattr(outputs, "pooler_output", None)
        if pooled is None:
            pooled = outputs.last_hidden_state[:, 0]
        return pooled[0].numpy().astype(np.float64)

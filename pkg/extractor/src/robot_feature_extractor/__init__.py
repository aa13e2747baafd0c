"""Offline extraction of metaphor and image embeddings for robot assets."""

__version__ = "0.1.0"

from .assets import AssetError, RawRobotAsset, read_manifest
from .embedders import ImageEmbedder, TextEmbedder
from .writer import write_feature_csvs

__all__ = [
    "AssetError", "RawRobotAsset", "read_manifest",
    "ImageEmbedder", "TextEmbedder", "write_feature_csvs",
]

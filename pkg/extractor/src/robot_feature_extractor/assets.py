"""Raw robot assets and the input manifest.

The manifest is a CSV with header ``id,image_path,metaphor1,metaphor2,metaphor3``;
metaphor2 and metaphor3 may be empty.  Relative image paths resolve against the
manifest's directory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from PIL import Image, UnidentifiedImageError


class AssetError(Exception):
    """Raised for malformed manifests or undecodable assets."""


@dataclass(frozen=True)
class RawRobotAsset:
    id: str
    image_path: Path
    metaphors: tuple[str, ...]


MANIFEST_HEADER = ["id", "image_path", "metaphor1", "metaphor2", "metaphor3"]


def read_manifest(path: str | Path) -> list[RawRobotAsset]:
    """Parse and validate the asset manifest; image files must exist and decode."""
    path = Path(path)
    if not path.is_file():
        raise AssetError(f"manifest not found: {path}")
    assets: list[RawRobotAsset] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise AssetError(f"{path.name}: empty manifest") from None
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise AssetError(
                f"{path.name}: header must be {','.join(MANIFEST_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise AssetError(f"{path.name}: line {lineno}: expected "
                                 f"{len(MANIFEST_HEADER)} columns, got {len(row)}")
            asset_id = row[0].strip()
            if not asset_id:
                raise AssetError(f"{path.name}: line {lineno}: empty id")
            if asset_id in seen:
                raise AssetError(f"{path.name}: line {lineno}: duplicate id {asset_id!r}")
            seen.add(asset_id)
            image_path = Path(row[1].strip())
            if not image_path.is_absolute():
                image_path = path.parent / image_path
            _check_image(image_path, asset_id)
            metaphors = tuple(m.strip() for m in row[2:5] if m.strip())
            if not metaphors:
                raise AssetError(
                    f"{path.name}: line {lineno}: id {asset_id!r} has no metaphors")
            assets.append(RawRobotAsset(id=asset_id, image_path=image_path,
                                        metaphors=metaphors))
    if not assets:
        raise AssetError(f"{path.name}: manifest lists no assets")
    return assets


def _check_image(image_path: Path, asset_id: str) -> None:
    if not image_path.is_file():
        raise AssetError(f"id {asset_id!r}: image not found: {image_path}")
    try:
        with Image.open(image_path) as img:
            img.verify()
    except (UnidentifiedImageError, OSError) as exc:
        raise AssetError(f"id {asset_id!r}: cannot decode {image_path}: {exc}") from None

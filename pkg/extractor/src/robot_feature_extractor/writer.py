"""All-or-nothing export of metaphor.csv and image.csv.

Output files follow the roboexpect dataset schema: header ``id,e0,...,e{d-1}``,
one row per asset in manifest order, floats at full round-trip precision.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .assets import AssetError, RawRobotAsset
from .embedders import ImageEmbedder, TextEmbedder


def _render_csv(rows: list[tuple[str, np.ndarray]]) -> str:
    dim = len(rows[0][1])
    for asset_id, vec in rows:
        if len(vec) != dim:
            raise AssetError(
                f"id {asset_id!r}: embedding width {len(vec)} differs from {dim}")
        if not np.all(np.isfinite(vec)):
            raise AssetError(f"id {asset_id!r}: embedding contains non-finite values")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id"] + [f"e{i}" for i in range(dim)])
    for asset_id, vec in rows:
        writer.writerow([asset_id] + [repr(float(v)) for v in vec])
    return buf.getvalue()


def write_feature_csvs(assets: list[RawRobotAsset], out_dir: str | Path,
                       text: TextEmbedder, vision: ImageEmbedder) -> None:
    """Embed every asset, then write both files; failures abort before writing."""
    if not assets:
        raise AssetError("no assets to process")
    metaphor_rows = [(a.id, text.embed_metaphors(a)) for a in assets]
    image_rows = [(a.id, vision.embed_image(a)) for a in assets]
    metaphor_csv = _render_csv(metaphor_rows)
    image_csv = _render_csv(image_rows)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metaphor.csv").write_text(metaphor_csv, encoding="utf-8")
    (out_dir / "image.csv").write_text(image_csv, encoding="utf-8")

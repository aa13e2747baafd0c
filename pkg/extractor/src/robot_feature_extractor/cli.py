"""Batch CLI: manifest in, metaphor.csv + image.csv out."""

from __future__ import annotations

import sys

import click

from . import __version__
from .assets import AssetError, read_manifest
from .embedders import DEFAULT_TEXT_MODEL, DEFAULT_VISION_MODEL, ImageEmbedder, TextEmbedder
from .writer import write_feature_csvs


@click.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CSV with columns id,image_path,metaphor1,metaphor2,metaphor3.")
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Directory receiving metaphor.csv and image.csv.")
@click.option("--text-model", default=DEFAULT_TEXT_MODEL, show_default=True,
              help="Pretrained text model id or local checkpoint path.")
@click.option("--vision-model", default=DEFAULT_VISION_MODEL, show_default=True,
              help="Pretrained vision model id or local checkpoint path.")
@click.version_option(version=__version__)
def main(manifest, out, text_model, vision_model):
    """Convert raw robot assets into the embedding CSVs consumed by roboexpect."""
    try:
        assets = read_manifest(manifest)
        text = TextEmbedder(text_model)
        vision = ImageEmbedder(vision_model)
        write_feature_csvs(assets, out, text, vision)
    except AssetError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    click.echo(f"wrote embeddings for {len(assets)} assets to {out}")


if __name__ == "__main__":
    main()

"""Command-line entry point: validate, gridsearch, run, extract-check.

Defaults reproduce the reference configuration (C=1.0, epsilon=0.1, 20 folds,
seed 42), so ``roboexpect run --data DIR --output report.md`` performs the
full experiment.  Exit codes: 0 success, 1 validation failure, 2 runtime or
solver failure.
"""

from __future__ import annotations

import csv
import math
import os
import sys
import tempfile
from pathlib import Path

import click

from . import __version__
from .dataset import DatasetError, load_dataset, validate
from .evaluation import (DEFAULT_GRID_VALUES, DEFAULT_K, DEFAULT_SEED, GridSpec,
                         grid_search, make_folds, pooled_score, run_experiment)
from .reporting import FORMATS, footer, render
from .svr import SCALE_DEFAULT, ConvergenceError, HyperParams

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class GammaParam(click.ParamType):
    name = "gamma"

    def convert(self, value, param, ctx):
        if isinstance(value, float) or value == SCALE_DEFAULT:
            return value
        try:
            v = float(value)
        except ValueError:
            self.fail(f"{value!r} is not a number or {SCALE_DEFAULT!r}", param, ctx)
        if v <= 0:
            self.fail("gamma must be positive", param, ctx)
        return v


class FloatListParam(click.ParamType):
    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(float(v) for v in value.split(","))
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


def _load(data_dir: str, expect_reference_shape: bool):
    try:
        ds = load_dataset(data_dir,
                          expect_reference_shape=expect_reference_shape or None)
    except DatasetError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    violations = validate(ds)
    if violations:
        for v in violations:
            click.echo(v, err=True)
        sys.exit(EXIT_VALIDATION)
    return ds


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


data_option = click.option("--data", "data_dir", required=True,
                           type=click.Path(exists=True, file_okay=False),
                           help="Dataset directory with the four CSV files.")
shape_option = click.option("--expect-reference-shape", is_flag=True, default=False,
                            help="Require 165 robots and 59 hand-crafted features.")


@click.group()
@click.version_option(version=__version__)
def main():
    """Predict social and functional expectations of robots from embodiment features."""


@main.command("validate")
@data_option
@shape_option
def cmd_validate(data_dir, expect_reference_shape):
    """Load a dataset directory and report every violation found."""
    _load(data_dir, expect_reference_shape)
    sys.exit(EXIT_OK)


@main.command("gridsearch")
@data_option
@shape_option
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=click.IntRange(min=0))
@click.option("--k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=2))
@click.option("--grid-c", type=FloatListParam(), default=DEFAULT_GRID_VALUES,
              help="Comma-separated C candidates.")
@click.option("--grid-eps", type=FloatListParam(), default=DEFAULT_GRID_VALUES,
              help="Comma-separated epsilon candidates.")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1))
def cmd_gridsearch(data_dir, expect_reference_shape, seed, k, grid_c, grid_eps, jobs):
    """Grid-search (C, epsilon) by pooled mean MSE over all constructs and combos."""
    ds = _load(data_dir, expect_reference_shape)
    grid = GridSpec(c_values=grid_c, epsilon_values=grid_eps)
    plan = make_folds(len(ds), k, seed)
    try:
        hp = grid_search(ds, grid, plan, jobs=jobs)
        pooled = pooled_score(ds, hp, plan, jobs=jobs)
    except ConvergenceError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"C={hp.c} epsilon={hp.epsilon} pooled_mse={pooled!r}")
    sys.exit(EXIT_OK)


@main.command("run")
@data_option
@shape_option
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=click.IntRange(min=0))
@click.option("--k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=2))
@click.option("--c", "c_value", default=1.0, show_default=True, type=float)
@click.option("--epsilon", default=0.1, show_default=True, type=float)
@click.option("--gamma", type=GammaParam(), default=SCALE_DEFAULT, show_default=True)
@click.option("--output", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="markdown",
              show_default=True)
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1))
def cmd_run(data_dir, expect_reference_shape, seed, k, c_value, epsilon, gamma,
            output, fmt, jobs):
    """Run the full experiment and write the report atomically."""
    ds = _load(data_dir, expect_reference_shape)
    try:
        hp = HyperParams(c=c_value, epsilon=epsilon, gamma=gamma)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    plan = make_folds(len(ds), k, seed)
    try:
        results = run_experiment(ds, hp, plan, jobs=jobs)
    except ConvergenceError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    text = render(results, fmt)
    text += "\n" + footer(seed, hp, k, ds.fingerprint, __version__) + "\n"
    _atomic_write(Path(output), text)
    sys.exit(EXIT_OK)


@main.command("extract-check")
@data_option
def cmd_extract_check(data_dir):
    """Check extractor-produced embedding CSVs (metaphor.csv, image.csv) for
    schema conformance: shared id sets, constant widths, finite values."""
    problems: list[str] = []
    ids_by_file: dict[str, list[str]] = {}
    for name in ("metaphor.csv", "image.csv"):
        path = Path(data_dir) / name
        if not path.is_file():
            problems.append(f"{name}: file is missing")
            continue
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                problems.append(f"{name}: empty file")
                continue
            if not header or header[0] != "id":
                problems.append(f"{name}: first header column must be 'id'")
                continue
            width = len(header) - 1
            if width < 1:
                problems.append(f"{name}: no embedding columns")
                continue
            ids: list[str] = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) - 1 != width:
                    problems.append(f"{name}: line {lineno}: row width {len(row) - 1}, "
                                    f"header declares {width}")
                    continue
                ids.append(row[0])
                for col, cell in enumerate(row[1:]):
                    try:
                        v = float(cell)
                    except ValueError:
                        problems.append(f"{name}: line {lineno}: unparseable value {cell!r}")
                        break
                    if not math.isfinite(v):
                        problems.append(f"{name}: line {lineno}: non-finite value in e{col}")
                        break
            if len(set(ids)) != len(ids):
                problems.append(f"{name}: duplicate ids present")
            ids_by_file[name] = ids
    if len(ids_by_file) == 2:
        a, b = ids_by_file["metaphor.csv"], ids_by_file["image.csv"]
        if set(a) != set(b):
            problems.append("metaphor.csv and image.csv disagree on the id set")
    for p in problems:
        click.echo(p, err=True)
    sys.exit(EXIT_VALIDATION if problems else EXIT_OK)


if __name__ == "__main__":
    main()

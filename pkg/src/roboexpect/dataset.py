"""Data model and on-disk ingestion for the robot expectation dataset.

A dataset directory holds four CSV files joined on the ``id`` column:
``hc.csv`` (hand-crafted features scaled to [0, 1]), ``metaphor.csv`` and
``image.csv`` (embedding vectors), and ``labels.csv`` (six construct ratings
in [-3, 3]).  An optional ``manifest.toml`` may set
``expect_reference_shape = true`` to enforce the reference cardinalities
(165 robots, 59 hand-crafted features).
"""

from __future__ import annotations

import csv
import enum
import hashlib
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class Construct(enum.Enum):
    """The six rated constructs, in report column order."""

    WARMTH = "warmth"
    COMPETENCE = "competence"
    DISCOMFORT = "discomfort"
    PERCEPTION_INTERPRETATION = "perception_interpretation"
    TACTILE_INTERACTION = "tactile_interaction"
    NONVERBAL_COMMUNICATION = "nonverbal_communication"

    @property
    def column(self) -> str:
        """Column name used in labels.csv."""
        return self.value

    @property
    def display(self) -> str:
        return _CONSTRUCT_DISPLAY[self]


_CONSTRUCT_DISPLAY = {
    Construct.WARMTH: "Warmth",
    Construct.COMPETENCE: "Competence",
    Construct.DISCOMFORT: "Discomfort",
    Construct.PERCEPTION_INTERPRETATION: "Perception and Interpretation",
    Construct.TACTILE_INTERACTION: "Tactile Interaction",
    Construct.NONVERBAL_COMMUNICATION: "Nonverbal Communication",
}

LABEL_MIN = -3.0
LABEL_MAX = 3.0


class Modality(enum.Enum):
    """Feature modalities, in canonical order HC, M, IM."""

    HC = "HC"
    M = "M"
    IM = "IM"

    @property
    def filename(self) -> str:
        return _MODALITY_FILES[self]


_MODALITY_FILES = {
    Modality.HC: "hc.csv",
    Modality.M: "metaphor.csv",
    Modality.IM: "image.csv",
}

REFERENCE_ROBOT_COUNT = 165
REFERENCE_HC_DIM = 59


class DatasetError(Exception):
    """Raised when a dataset directory cannot be loaded.

    Carries the file name, one-based line number, and the offending robot id
    where those are known.
    """

    def __init__(self, message: str, *, filename: str | None = None,
                 line: int | None = None, robot_id: str | None = None):
        self.filename = filename
        self.line = line
        self.robot_id = robot_id
        parts = []
        if filename is not None:
            parts.append(filename)
        if line is not None:
            parts.append(f"line {line}")
        if robot_id is not None:
            parts.append(f"id {robot_id!r}")
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class RobotRecord:
    """One robot: identifier, per-modality feature blocks, and construct labels."""

    id: str
    hc: np.ndarray
    metaphor_emb: np.ndarray
    image_emb: np.ndarray
    labels: dict[Construct, float]

    def block(self, m: Modality) -> np.ndarray:
        return {Modality.HC: self.hc, Modality.M: self.metaphor_emb,
                Modality.IM: self.image_emb}[m]


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of robots with consistent per-modality dimensions."""

    robots: tuple[RobotRecord, ...]
    dims: dict[Modality, int]
    fingerprint: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.robots)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.robots]


def _parse_float(text: str, *, filename: str, line: int, robot_id: str | None) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DatasetError(f"unparseable number {text!r}", filename=filename,
                          line=line, robot_id=robot_id) from None
    if not math.isfinite(v):
        raise DatasetError(f"non-finite value {text!r}", filename=filename,
                          line=line, robot_id=robot_id)
    return v


def _read_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Read a CSV into (header, [(line_number, row), ...]); blank lines skipped."""
    if not path.is_file():
        raise DatasetError("file is missing", filename=path.name)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header: list[str] | None = None
        rows: list[tuple[int, list[str]]] = []
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if header is None:
                header = [cell.strip() for cell in row]
            else:
                rows.append((lineno, [cell.strip() for cell in row]))
    if header is None:
        raise DatasetError("file is empty (no header row)", filename=path.name)
    return header, rows


def _read_feature_file(path: Path) -> tuple[dict[str, np.ndarray], int]:
    """Parse an id + feature-columns CSV; returns (id -> vector, width)."""
    header, rows = _read_rows(path)
    if not header or header[0] != "id":
        raise DatasetError("first header column must be 'id'", filename=path.name, line=1)
    width = len(header) - 1
    if width < 1:
        raise DatasetError("no feature columns declared", filename=path.name, line=1)
    out: dict[str, np.ndarray] = {}
    for lineno, row in rows:
        robot_id = row[0]
        if not robot_id:
            raise DatasetError("empty id", filename=path.name, line=lineno)
        if robot_id in out:
            raise DatasetError("duplicate id", filename=path.name, line=lineno,
                              robot_id=robot_id)
        if len(row) - 1 != width:
            raise DatasetError(
                f"row has {len(row) - 1} values, header declares {width}",
                filename=path.name, line=lineno, robot_id=robot_id)
        vec = np.array([_parse_float(c, filename=path.name, line=lineno,
                                     robot_id=robot_id) for c in row[1:]])
        out[robot_id] = vec
    return out, width


def _read_labels_file(path: Path) -> dict[str, dict[Construct, float]]:
    header, rows = _read_rows(path)
    expected = ["id"] + [c.column for c in Construct]
    if header != expected:
        raise DatasetError(
            f"header must be exactly {','.join(expected)}; got {','.join(header)}",
            filename=path.name, line=1)
    out: dict[str, dict[Construct, float]] = {}
    for lineno, row in rows:
        robot_id = row[0]
        if not robot_id:
            raise DatasetError("empty id", filename=path.name, line=lineno)
        if robot_id in out:
            raise DatasetError("duplicate id", filename=path.name, line=lineno,
                              robot_id=robot_id)
        if len(row) != len(expected):
            raise DatasetError(
                f"row has {len(row) - 1} values, expected {len(expected) - 1}",
                filename=path.name, line=lineno, robot_id=robot_id)
        labels = {}
        for construct, cell in zip(Construct, row[1:]):
            v = _parse_float(cell, filename=path.name, line=lineno, robot_id=robot_id)
            if not (LABEL_MIN <= v <= LABEL_MAX):
                raise DatasetError(
                    f"label {construct.column}={v!r} outside [{LABEL_MIN}, {LABEL_MAX}]",
                    filename=path.name, line=lineno, robot_id=robot_id)
            labels[construct] = v
        out[robot_id] = labels
    return out


def _read_manifest(dir_path: Path) -> dict:
    path = dir_path / "manifest.toml"
    if not path.is_file():
        return {}
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DatasetError(f"manifest parse error: {exc}", filename=path.name) from None


def _fingerprint(dir_path: Path) -> str:
    h = hashlib.sha256()
    for m in Modality:
        h.update((dir_path / m.filename).read_bytes())
    h.update((dir_path / "labels.csv").read_bytes())
    return h.hexdigest()


def load_dataset(dir_path: str | Path, *, expect_reference_shape: bool | None = None) -> Dataset:
    """Load and validate a dataset directory.

    Robot order follows first appearance in labels.csv; the four files are
    joined on the id column and must agree exactly on the id set.
    ``expect_reference_shape`` overrides the manifest flag when given.
    """
    dir_path = Path(dir_path)
    if not dir_path.is_dir():
        raise DatasetError(f"not a directory: {dir_path}")

    labels = _read_labels_file(dir_path / "labels.csv")
    blocks: dict[Modality, dict[str, np.ndarray]] = {}
    dims: dict[Modality, int] = {}
    for m in Modality:
        blocks[m], dims[m] = _read_feature_file(dir_path / m.filename)

    # Same id set in every file.
    label_ids = set(labels)
    for m in Modality:
        missing = label_ids - set(blocks[m])
        extra = set(blocks[m]) - label_ids
        if missing:
            raise DatasetError(f"id missing from {m.filename}",
                              filename=m.filename, robot_id=sorted(missing)[0])
        if extra:
            raise DatasetError(f"id absent from labels.csv",
                              filename=m.filename, robot_id=sorted(extra)[0])

    # HC range check with column context.
    for robot_id, vec in blocks[Modality.HC].items():
        bad = np.flatnonzero((vec < 0.0) | (vec > 1.0))
        if bad.size:
            col = int(bad[0])
            raise DatasetError(
                f"hand-crafted feature f{col}={vec[col]!r} outside [0, 1]",
                filename=Modality.HC.filename, robot_id=robot_id)

    robots = tuple(
        RobotRecord(
            id=robot_id,
            hc=blocks[Modality.HC][robot_id],
            metaphor_emb=blocks[Modality.M][robot_id],
            image_emb=blocks[Modality.IM][robot_id],
            labels=labels[robot_id],
        )
        for robot_id in labels  # dict preserves labels.csv order
    )
    ds = Dataset(robots=robots, dims=dims, fingerprint=_fingerprint(dir_path))

    manifest = _read_manifest(dir_path)
    if expect_reference_shape is None:
        expect_reference_shape = bool(manifest.get("expect_reference_shape", False))
    if expect_reference_shape:
        if len(ds) != REFERENCE_ROBOT_COUNT:
            raise DatasetError(
                f"reference shape expects {REFERENCE_ROBOT_COUNT} robots, found {len(ds)}")
        if dims[Modality.HC] != REFERENCE_HC_DIM:
            raise DatasetError(
                f"reference shape expects {REFERENCE_HC_DIM} hand-crafted features, "
                f"found {dims[Modality.HC]}", filename=Modality.HC.filename)
    return ds


def validate(ds: Dataset) -> list[str]:
    """Return a list of invariant violations; empty iff the dataset is well-formed."""
    violations: list[str] = []
    seen: set[str] = set()
    for r in ds.robots:
        if not r.id:
            violations.append("robot with empty id")
        if r.id in seen:
            violations.append(f"{r.id}: duplicate id")
        seen.add(r.id)
        for m in Modality:
            block = r.block(m)
            if len(block) != ds.dims[m]:
                violations.append(
                    f"{r.id}: {m.value} block has length {len(block)}, "
                    f"dims[{m.value}] = {ds.dims[m]}")
            if not np.all(np.isfinite(block)):
                violations.append(f"{r.id}: {m.value} block contains non-finite values")
        bad = np.flatnonzero((r.hc < 0.0) | (r.hc > 1.0))
        for col in bad:
            violations.append(
                f"{r.id}: hand-crafted feature f{int(col)}={r.hc[col]!r} outside [0, 1]")
        for c in Construct:
            if c not in r.labels:
                violations.append(f"{r.id}: missing label for {c.column}")
                continue
            v = r.labels[c]
            if not math.isfinite(v):
                violations.append(f"{r.id}: label {c.column} is non-finite")
            elif not (LABEL_MIN <= v <= LABEL_MAX):
                violations.append(
                    f"{r.id}: label {c.column}={v!r} outside [{LABEL_MIN}, {LABEL_MAX}]")
    return violations


def write_dataset(ds: Dataset, dir_path: str | Path) -> None:
    """Write the four CSV files with full round-trip float precision."""
    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)
    for m in Modality:
        prefix = "f" if m is Modality.HC else "e"
        with (dir_path / m.filename).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id"] + [f"{prefix}{i}" for i in range(ds.dims[m])])
            for r in ds.robots:
                writer.writerow([r.id] + [repr(float(v)) for v in r.block(m)])
    with (dir_path / "labels.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [c.column for c in Construct])
        for r in ds.robots:
            writer.writerow([r.id] + [repr(float(r.labels[c])) for c in Construct])

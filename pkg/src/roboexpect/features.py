"""Fused design matrices over the seven non-empty modality combinations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Construct, Dataset, Modality


@dataclass(frozen=True)
class ModalityCombo:
    """A non-empty subset of modalities, displayed in canonical HC, M, IM order."""

    subset: frozenset[Modality]

    def __post_init__(self):
        if not self.subset:
            raise ValueError("modality combination must be non-empty")

    @property
    def members(self) -> tuple[Modality, ...]:
        """Members in canonical concatenation order."""
        return tuple(m for m in Modality if m in self.subset)

    @property
    def label(self) -> str:
        return " + ".join(m.value for m in self.members)

    def __contains__(self, m: Modality) -> bool:
        return m in self.subset

    @classmethod
    def of(cls, *modalities: Modality) -> "ModalityCombo":
        return cls(frozenset(modalities))


def all_combos() -> list[ModalityCombo]:
    """The 7 combinations in report row order: HC, M, IM, HC+M, HC+IM, M+IM, HC+M+IM."""
    hc, m, im = Modality.HC, Modality.M, Modality.IM
    return [
        ModalityCombo.of(hc),
        ModalityCombo.of(m),
        ModalityCombo.of(im),
        ModalityCombo.of(hc, m),
        ModalityCombo.of(hc, im),
        ModalityCombo.of(m, im),
        ModalityCombo.of(hc, m, im),
    ]


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-major fused design matrix, rows aligned to the source dataset order."""

    values: np.ndarray
    robot_ids: tuple[str, ...]
    combo: ModalityCombo

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def fuse(ds: Dataset, combo: ModalityCombo, *, standardize: bool = False) -> FeatureMatrix:
    """Horizontally concatenate the selected modality blocks in HC, M, IM order.

    No rescaling is applied beyond what the dataset already carries unless
    ``standardize`` is set, which z-scores each fused column (zero-variance
    columns are left centered).
    """
    blocks = [np.vstack([r.block(m) for r in ds.robots]) for m in combo.members]
    values = np.hstack(blocks)
    if standardize:
        mean = values.mean(axis=0)
        std = values.std(axis=0)
        std[std == 0.0] = 1.0
        values = (values - mean) / std
    values.setflags(write=False)
    return FeatureMatrix(values=values, robot_ids=tuple(ds.ids), combo=combo)


def label_vector(ds: Dataset, c: Construct) -> np.ndarray:
    """Ground-truth ratings for one construct, aligned to dataset row order."""
    return np.array([r.labels[c] for r in ds.robots])

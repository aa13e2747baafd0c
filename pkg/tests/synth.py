"""Synthetic dataset builders shared across the test suite."""

from __future__ import annotations

import numpy as np

from roboexpect.dataset import Construct, Dataset, Modality, RobotRecord

PLANTED = Construct.WARMTH


def planted_dataset(n=165, hc_dim=59, emb_dim=512, seed=3, *,
                    emb_scale=0.1, noise_sd=1.0, signal_noise_sd=0.2) -> Dataset:
    """One construct is a linear function of the first 3 hand-crafted features
    plus Gaussian noise; the other five constructs are pure noise.

    Embeddings are low-variance so the fused RBF distances still see the
    hand-crafted block.
    """
    rng = np.random.default_rng(seed)
    robots = []
    for i in range(n):
        hc = rng.uniform(0.0, 1.0, hc_dim)
        planted = float(np.clip(
            2.0 * (hc[0] + hc[1] + hc[2]) - 3.0 + rng.normal(0.0, signal_noise_sd),
            -3.0, 3.0))
        labels = {PLANTED: planted}
        for c in Construct:
            if c is not PLANTED:
                labels[c] = float(np.clip(rng.normal(0.0, noise_sd), -3.0, 3.0))
        robots.append(RobotRecord(
            id=f"r{i:03d}",
            hc=hc,
            metaphor_emb=rng.normal(0.0, emb_scale, emb_dim),
            image_emb=rng.normal(0.0, emb_scale, emb_dim),
            labels=labels,
        ))
    return Dataset(robots=tuple(robots),
                   dims={Modality.HC: hc_dim, Modality.M: emb_dim, Modality.IM: emb_dim})


def random_dataset(n=5, hc_dim=4, m_dim=3, im_dim=6, seed=0) -> Dataset:
    """Small well-formed dataset with arbitrary labels, for I/O and fusion tests."""
    rng = np.random.default_rng(seed)
    robots = []
    for i in range(n):
        robots.append(RobotRecord(
            id=f"bot-{i}",
            hc=rng.uniform(0.0, 1.0, hc_dim),
            metaphor_emb=rng.normal(0.0, 1.0, m_dim),
            image_emb=rng.normal(0.0, 1.0, im_dim),
            labels={c: float(rng.uniform(-3.0, 3.0)) for c in Construct},
        ))
    return Dataset(robots=tuple(robots),
                   dims={Modality.HC: hc_dim, Modality.M: m_dim, Modality.IM: im_dim})

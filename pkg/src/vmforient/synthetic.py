"""Synthetic accelerometer logs for exercising the pipeline.

Directions are drawn from per-usage vMF models, scaled to a gravity-like
magnitude with small noise, and optionally salted with gross outliers and
blocks of repeated identical readings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingestion import AccelSample, LOG_COLUMNS, UsageType
from .vmf import VmfParams, sample_vmf

GRAVITY = 9.8


@dataclass(frozen=True)
class SyntheticSpec:
    usage: UsageType
    params: VmfParams
    n: int
    n_outliers: int = 0
    duplicate_block: int = 0


def synthesize(
    specs: Sequence[SyntheticSpec],
    rng=None,
    magnitude_spread: float = 0.1,
    t0: float = 0.0,
) -> list[AccelSample]:
    """Build a time-ordered sample list.

    Clean magnitudes are uniform on ``g +- magnitude_spread``, so while
    outliers and repeated readings together stay a small fraction of the
    rows the IQR fences sit near ``g +- 2 * magnitude_spread`` and keep every
    clean reading. Outliers have magnitude ``4 g``. A duplicate block
    repeats the first clean reading ``duplicate_block`` extra times.
    """
    rng = np.random.default_rng(rng)
    samples: list[AccelSample] = []
    t = t0
    for spec in specs:
        dirs = sample_vmf(spec.params, spec.n + spec.n_outliers, rng)
        mags = GRAVITY + rng.uniform(-magnitude_spread, magnitude_spread, spec.n)
        mags = np.concatenate([mags, np.full(spec.n_outliers, 4.0 * GRAVITY)])
        acc = dirs * mags[:, None]
        rows = [tuple(float(c) for c in a) for a in acc]
        if spec.duplicate_block and rows:
            rows = rows[:1] * (spec.duplicate_block + 1) + rows[1:]
        for a in rows:
            samples.append(AccelSample(t, a, spec.usage))
            t += 1.0
    return samples


def to_csv(samples: Sequence[AccelSample]) -> str:
    lines = [",".join(LOG_COLUMNS)]
    for s in samples:
        u = s.usage
        lines.append(
            ",".join(
                [repr(s.timestamp), *(repr(c) for c in s.a)]
                + [str(b) for b in (u.service, u.wired_headset, u.speaker, u.bluetooth)]
            )
        )
    return "\n".join(lines) + "\n"

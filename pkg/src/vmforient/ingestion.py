"""Accelerometer log parsing and clean-up.

The clean-up pipeline per usage type is: 1.5*IQR fence on the
acceleration magnitude, then removal of exact duplicate readings, then
normalization to orientation vectors. Fences are computed separately for
each usage type.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import DomainError

log = logging.getLogger(__name__)

LOG_COLUMNS = ("timestamp", "ax", "ay", "az", "service", "wired", "speaker", "bluetooth")
MIN_IQR_SAMPLES = 4
MAX_REJECT_FRACTION = 0.5


class LogFormatError(ValueError):
    """Too many malformed rows: the input is probably not an accelerometer log."""


@dataclass(frozen=True, order=True)
class UsageType:
    """4-bit phone usage classification, rendered as ``"ijkl"``.

    Bits, in order: service (0 voice, 1 non-voice), wired headset,
    speakerphone, Bluetooth headset.
    """

    service: int = 0
    wired_headset: int = 0
    speaker: int = 0
    bluetooth: int = 0

    def __post_init__(self):
        for name in ("service", "wired_headset", "speaker", "bluetooth"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"usage bit {name} must be 0 or 1")

    @property
    def code(self) -> str:
        return f"{self.service}{self.wired_headset}{self.speaker}{self.bluetooth}"

    def __str__(self) -> str:
        return self.code

    @classmethod
    def from_code(cls, code: str) -> UsageType:
        code = code.strip()
        if len(code) != 4 or any(c not in "01" for c in code):
            raise ValueError(f"usage code must be 4 binary digits, got {code!r}")
        return cls(*(int(c) for c in code))

    @classmethod
    def all(cls) -> list[UsageType]:
        return [cls.from_code(f"{i:04b}") for i in range(16)]


@dataclass(frozen=True)
class AccelSample:
    timestamp: float
    a: tuple[float, float, float]
    usage: UsageType

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.a[0] ** 2 + self.a[1] ** 2 + self.a[2] ** 2)


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str


@dataclass
class ParseResult:
    samples: list[AccelSample]
    rejects: list[Reject] = field(default_factory=list)


@dataclass(frozen=True)
class LogFormat:
    delimiter: str = ","
    has_header: bool = True
    columns: tuple[str, ...] = LOG_COLUMNS


@dataclass
class OrientationSet:
    usage: UsageType
    vectors: np.ndarray
    n_raw: int = 0
    n_after_iqr: int = 0
    n_after_dedup: int = 0

    def __len__(self) -> int:
        return len(self.vectors)


def _parse_row(row: Sequence[str]) -> tuple[float, tuple[float, float, float], UsageType]:
    if len(row) != len(LOG_COLUMNS):
        raise ValueError(f"expected {len(LOG_COLUMNS)} fields, got {len(row)}")
    try:
        t, ax, ay, az = (float(x) for x in row[:4])
    except ValueError:
        raise ValueError("non-numeric timestamp or acceleration") from None
    if not all(math.isfinite(v) for v in (t, ax, ay, az)):
        raise ValueError("non-finite value")
    bits = [b.strip() for b in row[4:]]
    if any(b not in ("0", "1") for b in bits):
        raise ValueError("usage bits must be 0 or 1")
    return t, (ax, ay, az), UsageType(*(int(b) for b in bits))


def parse_log(stream, fmt: LogFormat = LogFormat()) -> ParseResult:
    """Read an accelerometer CSV log.

    ``stream`` may be a text or binary file object, or a string. Malformed
    rows are skipped and reported with their 1-based line number. Rows whose
    timestamp goes backwards are rejected too. If more than half of the data
    rows are rejected a :class:`LogFormatError` is raised.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    elif isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text), delimiter=fmt.delimiter)

    samples: list[AccelSample] = []
    rejects: list[Reject] = []
    n_rows = 0
    last_t = -math.inf
    for line_no, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if line_no == 1 and fmt.has_header:
            if tuple(c.strip() for c in row) == tuple(fmt.columns):
                continue
        n_rows += 1
        try:
            t, a, usage = _parse_row(row)
        except ValueError as exc:
            rejects.append(Reject(line_no, str(exc)))
            continue
        if t < last_t:
            rejects.append(Reject(line_no, "timestamp decreases"))
            continue
        last_t = t
        samples.append(AccelSample(t, a, usage))

    for r in rejects:
        log.info("line %d skipped: %s", r.line, r.reason)
    if n_rows and len(rejects) > MAX_REJECT_FRACTION * n_rows:
        raise LogFormatError(f"{len(rejects)} of {n_rows} rows rejected; wrong input format?")
    return ParseResult(samples, rejects)


def partition_by_usage(samples: Iterable[AccelSample]) -> dict[UsageType, list[AccelSample]]:
    buckets: dict[UsageType, list[AccelSample]] = {}
    for s in samples:
        buckets.setdefault(s.usage, []).append(s)
    return dict(sorted(buckets.items()))


def quartile_fences(values, k: float = 1.5) -> tuple[float, float]:
    """Tukey fences ``(Q1 - k*IQR, Q3 + k*IQR)``.

    Quartiles interpolate linearly between order statistics at position
    ``1 + (n-1)q`` (numpy's default ``linear`` method).
    """
    q1, q3 = np.quantile(np.asarray(values, dtype=float), [0.25, 0.75])
    iqr = q3 - q1
    return float(q1 - k * iqr), float(q3 + k * iqr)


def iqr_filter(samples: Sequence[AccelSample]) -> tuple[list[AccelSample], list[AccelSample]]:
    """Split samples into (kept, removed) by the 1.5*IQR rule on ``|a|``."""
    samples = list(samples)
    if len(samples) < MIN_IQR_SAMPLES:
        log.warning("iqr_filter: %d samples is too few for quartiles; passing through", len(samples))
        return samples, []
    mags = np.array([s.magnitude for s in samples])
    lo, hi = quartile_fences(mags)
    keep = (mags >= lo) & (mags <= hi)
    kept = [s for s, k in zip(samples, keep) if k]
    removed = [s for s, k in zip(samples, keep) if not k]
    return kept, removed


def dedup(samples: Iterable[AccelSample]) -> list[AccelSample]:
    """Drop later samples whose (ax, ay, az) bitwise repeats an earlier one."""
    seen: set[bytes] = set()
    out = []
    for s in samples:
        key = struct.pack("<3d", *s.a)
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def to_orientations(
    samples: Sequence[AccelSample],
    usage: UsageType | None = None,
    n_raw: int | None = None,
    n_after_iqr: int | None = None,
) -> OrientationSet:
    """Normalize accelerations to orientation vectors.

    Expects already filtered samples; the count arguments let the caller
    record the earlier pipeline stages. Zero-magnitude samples are dropped.
    """
    samples = list(samples)
    if usage is None:
        usage = samples[0].usage if samples else UsageType()
    a = np.array([s.a for s in samples], dtype=float).reshape(-1, 3)
    norms = np.linalg.norm(a, axis=1)
    nonzero = norms > 0
    if not np.all(nonzero):
        log.warning("dropping %d zero-magnitude samples", int((~nonzero).sum()))
    vectors = a[nonzero] / norms[nonzero, None]
    n = len(vectors)
    return OrientationSet(
        usage=usage,
        vectors=vectors,
        n_raw=n if n_raw is None else n_raw,
        n_after_iqr=n if n_after_iqr is None else n_after_iqr,
        n_after_dedup=n,
    )


def clean_bucket(usage: UsageType, samples: Sequence[AccelSample]) -> OrientationSet:
    """Run IQR filter, dedup and normalization on one usage type."""
    kept, _ = iqr_filter(samples)
    unique = dedup(kept)
    return to_orientations(unique, usage=usage, n_raw=len(samples), n_after_iqr=len(kept))


def ingest(samples: Iterable[AccelSample]) -> dict[UsageType, OrientationSet]:
    return {u: clean_bucket(u, bucket) for u, bucket in partition_by_usage(samples).items()}


def magnitude_cdf(samples: Sequence[AccelSample], grid) -> np.ndarray:
    """Empirical CDF of ``|a|`` evaluated at each grid value.

    Returns an array of ``(value, probability)`` rows.
    """
    if len(samples) == 0:
        raise DomainError("magnitude_cdf needs at least one sample")
    mags = np.sort([s.magnitude for s in samples])
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    prob = np.searchsorted(mags, grid, side="right") / len(mags)
    return np.column_stack([grid, prob])

"""Frame-feature tables: sampling grid, interchange format, shot selection.

Features are D-dimensional float32 vectors computed by an external image
encoder on frames sampled at a fixed rate (3 fps by default). They travel
in the MEMFEAT v1 text format:

    MEMFEAT\\tv1\\tdim=<D>[\\t<key>=<value>...]
    <timestamp_ms>\\t<v0>,<v1>,...

Floats are written in shortest round-trip form for 32-bit precision, so
write-then-read is bit-exact. Extra ``key=value`` header fields (e.g. an
encoder id recorded by the extraction tool) are preserved as metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError, SchemaError, ValidationError
from .shots import Shot

MAGIC = "MEMFEAT"
VERSION = "v1"

# Frames this far outside a shot can still represent it.
SELECTION_SLACK_MS = 2000

DEFAULT_RATE_PER_S = 3.0
DEFAULT_K_FRAMES = 3


@dataclass(frozen=True)
class FrameFeature:
    timestamp_ms: int
    vector: np.ndarray  # 1-D float32

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float32)
        object.__setattr__(self, "vector", vec)
        if vec.ndim != 1:
            raise ValidationError(f"feature vector must be 1-D, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(f"non-finite feature value at t={self.timestamp_ms}")


@dataclass
class FeatureTable:
    episode_id: str
    dim: int
    frames: list[FrameFeature]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")
        times = [f.timestamp_ms for f in self.frames]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError(
                f"{self.episode_id}: frame timestamps not strictly increasing"
            )
        for f in self.frames:
            if f.vector.shape[0] != self.dim:
                raise ValidationError(
                    f"{self.episode_id}: frame at t={f.timestamp_ms} has dim "
                    f"{f.vector.shape[0]}, table declares {self.dim}"
                )

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp_ms for f in self.frames], dtype=np.int64)

    def matrix(self) -> np.ndarray:
        if not self.frames:
            return np.empty((0, self.dim), dtype=np.float32)
        return np.vstack([f.vector for f in self.frames])


def sample_times(duration_ms: int, rate_per_s: float = DEFAULT_RATE_PER_S) -> list[int]:
    """Frame sampling grid: t_k = floor(k * 1000 / rate) for
    k = 0 .. ceil(duration_ms * rate / 1000) - 1. All times < duration_ms.
    """
    if duration_ms < 0:
        raise ValueError(f"duration_ms must be >= 0, got {duration_ms}")
    if rate_per_s <= 0:
        raise ValueError(f"rate_per_s must be > 0, got {rate_per_s}")
    count = math.ceil(duration_ms * rate_per_s / 1000)
    if float(rate_per_s).is_integer():
        rate = int(rate_per_s)
        return [(k * 1000) // rate for k in range(count)]
    return [math.floor(k * 1000 / rate_per_s) for k in range(count)]


def write_feature_table(table: FeatureTable, path: Path) -> None:
    header = [MAGIC, VERSION, f"dim={table.dim}"]
    header.extend(f"{k}={v}" for k, v in sorted(table.meta.items()))
    lines = ["\t".join(header)]
    for frame in table.frames:
        values = ",".join(str(v) for v in frame.vector)
        lines.append(f"{frame.timestamp_ms}\t{values}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_feature_table(path: Path, episode_id: str | None = None) -> FeatureTable:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty feature file")
    parts = lines[0].split("\t")
    if len(parts) < 3 or parts[0] != MAGIC or parts[1] != VERSION:
        raise SchemaError(f"{path}: bad header {lines[0]!r} (expected MEMFEAT v1)")
    if not parts[2].startswith("dim="):
        raise SchemaError(f"{path}: header missing dim= field")
    try:
        dim = int(parts[2].removeprefix("dim="))
    except ValueError:
        raise SchemaError(f"{path}: bad dim field {parts[2]!r}") from None
    meta: dict[str, str] = {}
    for extra in parts[3:]:
        key, sep, value = extra.partition("=")
        if not sep:
            raise SchemaError(f"{path}: bad header field {extra!r} (expected key=value)")
        meta[key] = value
    frames: list[FrameFeature] = []
    prev_t: int | None = None
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        time_s, sep, values_s = line.partition("\t")
        if not sep:
            raise ParseError("expected '<timestamp_ms>\\t<values>'", path=path, line=line_no)
        try:
            t = int(time_s)
        except ValueError:
            raise ParseError(f"bad timestamp {time_s!r}", path=path, line=line_no) from None
        if prev_t is not None and t <= prev_t:
            raise ParseError(
                f"non-monotone timestamp {t} after {prev_t}", path=path, line=line_no
            )
        prev_t = t
        try:
            vec = np.array(values_s.split(","), dtype=np.float32)
        except ValueError:
            raise ParseError("bad float value in feature row", path=path, line=line_no) from None
        if vec.size != dim:
            raise ParseError(
                f"expected {dim} values, got {vec.size}", path=path, line=line_no
            )
        frames.append(FrameFeature(timestamp_ms=t, vector=vec))
    return FeatureTable(
        episode_id=episode_id or path.stem, dim=dim, frames=frames, meta=meta
    )


class EmptySelectionError(ValidationError):
    """No frame lies within the selection slack of a shot's interval."""

    def __init__(self, shot: Shot):
        self.shot = shot
        super().__init__(
            f"shot {shot.shot_index} [{shot.start_ms}, {shot.end_ms}) of "
            f"{shot.episode_id or 'episode'}: no frames within "
            f"{SELECTION_SLACK_MS} ms of the shot interval"
        )


def select_representative(
    shot: Shot, table: FeatureTable, k: int = DEFAULT_K_FRAMES
) -> list[FrameFeature]:
    """Pick up to ``k`` frames to stand in for a shot.

    Target times sit at fractions (i + 0.5) / k of the shot interval;
    each target takes the nearest candidate frame (ties to the earlier
    frame), and duplicate picks collapse. Candidates must lie within
    ``SELECTION_SLACK_MS`` of the shot interval.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    times = table.timestamps
    lo = shot.start_ms - SELECTION_SLACK_MS
    hi = shot.end_ms + SELECTION_SLACK_MS
    first = int(np.searchsorted(times, lo, side="left"))
    last = int(np.searchsorted(times, hi, side="right"))
    if first >= last:
        raise EmptySelectionError(shot)
    window = times[first:last]
    picked: dict[int, None] = {}
    span = shot.end_ms - shot.start_ms
    for i in range(k):
        target = shot.start_ms + (i + 0.5) / k * span
        j = int(np.searchsorted(window, target, side="left"))
        # Candidates are window[j-1] (earlier) and window[j]; prefer earlier on ties.
        best = None
        for cand in (j - 1, j):
            if 0 <= cand < window.size:
                if best is None or abs(window[cand] - target) < abs(window[best] - target):
                    best = cand
        picked.setdefault(first + best, None)
    return [table.frames[i] for i in picked]


def shot_frame_matrix(
    shots: Sequence[Shot], table: FeatureTable, k: int = DEFAULT_K_FRAMES
) -> dict[int, list[np.ndarray]]:
    """Map shot_index -> representative feature vectors, in shot order."""
    out: dict[int, list[np.ndarray]] = {}
    for shot in shots:
        frames = select_representative(shot, table, k=k)
        out[shot.shot_index] = [f.vector for f in frames]
    return out

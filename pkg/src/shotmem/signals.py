"""Chronological memorability signals and moving-average smoothing.

The raw per-shot scores form a jagged time series; smoothing replaces
each point with the mean of the raw scores inside a centered window of
nominal size N (indices i - floor(N/2) .. i + floor(N/2), shrunk at the
edges), which preserves signal length. A sweep over window sizes
(15..305 by default) yields one smoothed signal per N.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SchemaError, ValidationError
from .regression import ShotScore
from .shots import Shot

DEFAULT_SWEEP = (15, 305, 10)


@dataclass(frozen=True)
class SignalPoint:
    shot_index: int
    start_ms: int
    score: float


@dataclass(frozen=True)
class MemSignal:
    episode_id: str
    points: tuple[SignalPoint, ...]

    def __post_init__(self):
        indices = [p.shot_index for p in self.points]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValidationError(f"{self.episode_id}: shot_index not strictly increasing")
        if any(not np.isfinite(p.score) for p in self.points):
            raise ValidationError(f"{self.episode_id}: non-finite score in signal")

    def __len__(self) -> int:
        return len(self.points)

    def scores(self) -> np.ndarray:
        return np.array([p.score for p in self.points], dtype=np.float64)

    def with_scores(self, scores: Sequence[float]) -> "MemSignal":
        if len(scores) != len(self.points):
            raise ValidationError(
                f"{self.episode_id}: {len(scores)} scores for {len(self.points)} points"
            )
        return MemSignal(
            episode_id=self.episode_id,
            points=tuple(
                SignalPoint(p.shot_index, p.start_ms, float(s))
                for p, s in zip(self.points, scores)
            ),
        )


@dataclass(frozen=True)
class SmoothingConfig:
    window: int
    edge_rule: str = "shrink"

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"smoothing window must be >= 1, got {self.window}")
        if self.edge_rule != "shrink":
            raise ValidationError(f"unsupported edge rule {self.edge_rule!r}")


def build_signal(shots: Sequence[Shot], scores: Iterable[ShotScore]) -> MemSignal:
    """Order shot scores chronologically, matching on shot_index."""
    by_index = {}
    for s in scores:
        if s.shot_index in by_index:
            raise ValidationError(f"duplicate score for shot {s.shot_index}")
        by_index[s.shot_index] = s
    missing = [s.shot_index for s in shots if s.shot_index not in by_index]
    if missing or len(by_index) != len(shots):
        detail = f", missing shots {missing[:5]}" if missing else ""
        raise ValidationError(
            f"scores do not match shots: {len(shots)} shots, {len(by_index)} scores{detail}"
        )
    episode_id = shots[0].episode_id if shots else ""
    ordered = sorted(shots, key=lambda s: s.start_ms)
    return MemSignal(
        episode_id=episode_id,
        points=tuple(
            SignalPoint(s.shot_index, s.start_ms, by_index[s.shot_index].score)
            for s in ordered
        ),
    )


def smooth_scores(scores: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with edge shrink over a raw score array."""
    if window < 1:
        raise ValidationError(f"smoothing window must be >= 1, got {window}")
    x = np.asarray(scores, dtype=np.float64)
    n = x.shape[0]
    if n == 0 or window == 1:
        return x.copy()
    half = window // 2
    width = 2 * half + 1
    # full-mode position i+half sums exactly x[max(0, i-half) : min(n, i+half+1)]
    sums = np.convolve(x, np.ones(width), mode="full")[half : half + n]
    idx = np.arange(n)
    counts = np.minimum(idx + half, n - 1) - np.maximum(idx - half, 0) + 1
    return sums / counts


def smooth(signal: MemSignal, cfg: SmoothingConfig) -> MemSignal:
    return signal.with_scores(smooth_scores(signal.scores(), cfg.window))


def sweep_windows(
    signal: MemSignal,
    n_min: int = DEFAULT_SWEEP[0],
    n_max: int = DEFAULT_SWEEP[1],
    step: int = DEFAULT_SWEEP[2],
) -> dict[int, MemSignal]:
    """Smooth at every window size in ``range(n_min, n_max + 1, step)``."""
    if n_min > n_max:
        raise ValidationError(f"n_min {n_min} > n_max {n_max}")
    if n_min < 1 or step < 1:
        raise ValidationError(f"invalid sweep ({n_min}, {n_max}, {step})")
    raw = signal.scores()
    return {
        n: signal.with_scores(smooth_scores(raw, n))
        for n in range(n_min, n_max + 1, step)
    }


def write_signal(
    signal: MemSignal, smoothed: dict[int, MemSignal], path: Path
) -> None:
    """Export ``shot_index\\tstart_ms\\traw\\tsmoothed_N...`` columns."""
    windows = sorted(smoothed)
    for n in windows:
        if len(smoothed[n]) != len(signal):
            raise ValidationError(
                f"smoothed signal for N={n} has length {len(smoothed[n])}, raw has "
                f"{len(signal)}"
            )
    header = ["shot_index", "start_ms", "raw", *(f"smoothed_{n}" for n in windows)]
    lines = ["\t".join(header)]
    for i, p in enumerate(signal.points):
        row = [str(p.shot_index), str(p.start_ms), repr(p.score)]
        row.extend(repr(smoothed[n].points[i].score) for n in windows)
        lines.append("\t".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_signal(path: Path, episode_id: str | None = None) -> tuple[MemSignal, dict[int, MemSignal]]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty signal file")
    header = lines[0].split("\t")
    if header[:3] != ["shot_index", "start_ms", "raw"]:
        raise SchemaError(f"{path}: bad header {lines[0]!r}")
    windows: list[int] = []
    for col in header[3:]:
        if not col.startswith("smoothed_"):
            raise SchemaError(f"{path}: unexpected column {col!r}")
        try:
            windows.append(int(col.removeprefix("smoothed_")))
        except ValueError:
            raise SchemaError(f"{path}: bad window column {col!r}") from None
    raw_points: list[SignalPoint] = []
    smoothed_scores: dict[int, list[float]] = {n: [] for n in windows}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(fields)}", path=path, line=line_no
            )
        try:
            raw_points.append(
                SignalPoint(int(fields[0]), int(fields[1]), float(fields[2]))
            )
            for n, value in zip(windows, fields[3:]):
                smoothed_scores[n].append(float(value))
        except ValueError:
            raise ParseError("bad numeric field", path=path, line=line_no) from None
    ep = episode_id or path.stem
    raw = MemSignal(episode_id=ep, points=tuple(raw_points))
    smoothed = {n: raw.with_scores(smoothed_scores[n]) for n in windows}
    return raw, smoothed

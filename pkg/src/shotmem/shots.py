"""Shot segmentation: interchange format, validation, fallback detector.

Shot lists normally arrive from an external neural boundary detector
through the tab-separated interchange format
(``episode_id\\tshot_index\\tstart_ms\\tend_ms``). When no such file is
available, :func:`detect_shots_histogram` provides a classical fallback
cutting on L1 color-histogram jumps between consecutive frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SchemaError, ValidationError

SHOT_LIST_COLUMNS = ("episode_id", "shot_index", "start_ms", "end_ms")

DEFAULT_THRESHOLD = 0.5
DEFAULT_MIN_SHOT_MS = 400


@dataclass(frozen=True)
class Shot:
    episode_id: str
    shot_index: int
    start_ms: int
    end_ms: int

    def __post_init__(self):
        if self.shot_index < 0:
            raise ValidationError(f"shot_index {self.shot_index} < 0")
        if self.start_ms >= self.end_ms:
            raise ValidationError(
                f"shot {self.shot_index}: start_ms {self.start_ms} >= end_ms {self.end_ms}"
            )

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    def overlaps(self, start_ms: int, end_ms: int) -> bool:
        return max(self.start_ms, start_ms) < min(self.end_ms, end_ms)


@dataclass(frozen=True)
class FrameHistogramSequence:
    """Uniformly spaced, normalized color histograms (fallback detector input)."""

    frame_interval_ms: int
    histograms: np.ndarray  # (n_frames, n_bins) float array, rows sum to 1

    def __post_init__(self):
        if self.frame_interval_ms <= 0:
            raise ValidationError(f"frame_interval_ms must be > 0, got {self.frame_interval_ms}")
        hist = np.asarray(self.histograms, dtype=np.float64)
        object.__setattr__(self, "histograms", hist)
        if hist.ndim != 2:
            raise ValidationError(f"histograms must be 2-D, got shape {hist.shape}")
        if hist.shape[0]:
            sums = hist.sum(axis=1)
            bad = np.nonzero(np.abs(sums - 1.0) > 1e-6)[0]
            if bad.size:
                raise ValidationError(
                    f"histogram rows not normalized (first offender: frame {bad[0]}, "
                    f"sum {sums[bad[0]]!r})"
                )

    @property
    def n_frames(self) -> int:
        return self.histograms.shape[0]

    @property
    def duration_ms(self) -> int:
        return self.n_frames * self.frame_interval_ms


def _validate_sequence(shots: Sequence[Shot], episode_id: str, path=None) -> None:
    for prev, cur in zip(shots, shots[1:]):
        if cur.start_ms < prev.start_ms:
            raise ValidationError(
                f"{path or 'shot list'}: episode {episode_id}: shots {prev.shot_index} and "
                f"{cur.shot_index} are out of order by start_ms"
            )
        if cur.start_ms < prev.end_ms:
            raise ValidationError(
                f"{path or 'shot list'}: episode {episode_id}: shots {prev.shot_index} and "
                f"{cur.shot_index} overlap ({prev.end_ms} > {cur.start_ms})"
            )


def parse_shot_list(text: str, path=None, strict: bool = True) -> list[Shot]:
    """Parse and validate a shot-list interchange file.

    In strict mode rows must already be ordered by start time with
    strictly increasing indices; otherwise they are sorted per episode
    and reindexed 0..n-1. Overlaps are an error in both modes.
    """
    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{path or 'shot list'}: empty file (header row required)")
    header = lines[0].split("\t")
    if header != list(SHOT_LIST_COLUMNS):
        raise SchemaError(
            f"{path or 'shot list'}: bad header: expected {list(SHOT_LIST_COLUMNS)}, got {header}"
        )
    shots: list[Shot] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", path=path, line=line_no)
        episode_id, index_s, start_s, end_s = fields
        try:
            shot = Shot(episode_id, int(index_s), int(start_s), int(end_s))
        except ValueError:
            raise ParseError(f"non-integer field in {fields[1:]!r}", path=path, line=line_no) from None
        except ValidationError as exc:
            raise ValidationError(f"{path or 'shot list'}: line {line_no}: {exc}") from None
        shots.append(shot)

    by_episode: dict[str, list[Shot]] = {}
    for shot in shots:
        by_episode.setdefault(shot.episode_id, []).append(shot)

    if strict:
        for episode_id, seq in by_episode.items():
            _validate_sequence(seq, episode_id, path)
            indices = [s.shot_index for s in seq]
            if any(b <= a for a, b in zip(indices, indices[1:])):
                raise ValidationError(
                    f"{path or 'shot list'}: episode {episode_id}: shot_index not strictly "
                    f"increasing: {indices[:10]}"
                )
        return shots

    out: list[Shot] = []
    for episode_id in by_episode:
        seq = sorted(by_episode[episode_id], key=lambda s: s.start_ms)
        seq = [
            Shot(s.episode_id, i, s.start_ms, s.end_ms) for i, s in enumerate(seq)
        ]
        _validate_sequence(seq, episode_id, path)
        out.extend(seq)
    return out


def read_shot_list(path: Path, strict: bool = True) -> list[Shot]:
    path = Path(path)
    return parse_shot_list(path.read_text(encoding="utf-8"), path=path, strict=strict)


def write_shot_list(shots: Iterable[Shot], path: Path) -> None:
    lines = ["\t".join(SHOT_LIST_COLUMNS)]
    for s in shots:
        lines.append(f"{s.episode_id}\t{s.shot_index}\t{s.start_ms}\t{s.end_ms}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def detect_shots_histogram(
    seq: FrameHistogramSequence,
    episode_id: str = "",
    threshold: float = DEFAULT_THRESHOLD,
    min_shot_ms: int = DEFAULT_MIN_SHOT_MS,
) -> list[Shot]:
    """Classical fallback detector: cut where the L1 histogram jump exceeds
    ``threshold``, suppressing cuts closer than ``min_shot_ms`` to the last
    kept boundary. The returned shots tile ``[0, duration_ms)``.
    """
    if not 0 < threshold <= 2:
        raise ValueError(f"threshold must be in (0, 2], got {threshold}")
    if min_shot_ms <= 0:
        raise ValueError(f"min_shot_ms must be > 0, got {min_shot_ms}")
    n = seq.n_frames
    if n == 0:
        return []
    interval = seq.frame_interval_ms
    boundaries: list[int] = []
    if n >= 2:
        dist = np.abs(np.diff(seq.histograms, axis=0)).sum(axis=1)
        last = 0
        for i in np.nonzero(dist > threshold)[0]:
            t = (int(i) + 1) * interval
            if t - last >= min_shot_ms:
                boundaries.append(t)
                last = t
    edges = [0, *boundaries, seq.duration_ms]
    return [
        Shot(episode_id, idx, start, end)
        for idx, (start, end) in enumerate(zip(edges, edges[1:]))
    ]


@dataclass(frozen=True)
class ShotListReport:
    """Report-only validation outcome: gaps, overlaps, out-of-duration shots."""

    gaps: tuple[tuple[int, int], ...]
    overlaps: tuple[tuple[int, int], ...]  # offending (shot_index, shot_index) pairs
    out_of_range: tuple[int, ...]  # shot indices ending past the episode duration

    @property
    def is_clean(self) -> bool:
        return not (self.gaps or self.overlaps or self.out_of_range)


def validate_shot_list(shots: Sequence[Shot], episode_duration_ms: int) -> ShotListReport:
    ordered = sorted(shots, key=lambda s: s.start_ms)
    gaps: list[tuple[int, int]] = []
    overlaps: list[tuple[int, int]] = []
    out_of_range: list[int] = []
    if ordered and ordered[0].start_ms > 0:
        gaps.append((0, ordered[0].start_ms))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start_ms > prev.end_ms:
            gaps.append((prev.end_ms, cur.start_ms))
        elif cur.start_ms < prev.end_ms:
            overlaps.append((prev.shot_index, cur.shot_index))
    if ordered and ordered[-1].end_ms < episode_duration_ms:
        gaps.append((ordered[-1].end_ms, episode_duration_ms))
    for shot in ordered:
        if shot.end_ms > episode_duration_ms:
            out_of_range.append(shot.shot_index)
    return ShotListReport(tuple(gaps), tuple(overlaps), tuple(out_of_range))


# Histogram sequences travel as a small text format mirroring the feature
# tables: a versioned header, then one comma-joined row per frame.
HIST_MAGIC = "MEMHIST"


def write_histograms(seq: FrameHistogramSequence, path: Path) -> None:
    lines = [f"{HIST_MAGIC}\tv1\tbins={seq.histograms.shape[1]}\tinterval_ms={seq.frame_interval_ms}"]
    for row in np.asarray(seq.histograms, dtype=np.float32):
        lines.append(",".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_histograms(path: Path) -> FrameHistogramSequence:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty histogram file")
    parts = lines[0].split("\t")
    if len(parts) != 4 or parts[0] != HIST_MAGIC or parts[1] != "v1":
        raise SchemaError(f"{path}: bad header {lines[0]!r}")
    try:
        bins = int(parts[2].removeprefix("bins="))
        interval = int(parts[3].removeprefix("interval_ms="))
    except ValueError:
        raise SchemaError(f"{path}: bad header {lines[0]!r}") from None
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        values = np.array(line.split(","), dtype=np.float32)
        if values.size != bins:
            raise ParseError(
                f"expected {bins} bins, got {values.size}", path=path, line=line_no
            )
        rows.append(values)
    hist = np.vstack(rows) if rows else np.empty((0, bins), dtype=np.float32)
    return FrameHistogramSequence(frame_interval_ms=interval, histograms=hist)

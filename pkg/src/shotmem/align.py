"""Join shots to the annotated corpus by time overlap.

A sentence belongs to every shot whose interval it overlaps by more than
0 ms (shots are typically much shorter than the 5 s sentence grid, so a
sentence usually spans several shots). Shot contexts union the speakers,
aspects and scene ids of their assigned sentences; speaking-time and
scene-count statistics come straight from the annotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Aspect, EpisodeAnnotation, format_aspect_set, parse_aspect_set
from .errors import ParseError, SchemaError
from .shots import Shot

CONTEXT_COLUMNS = ("shot_index", "speakers", "aspects", "scene_ids")

DEFAULT_TOP_K_CAST = 6

MS_PER_MINUTE = 60_000.0


@dataclass(frozen=True)
class ShotContext:
    shot_index: int
    sentence_ids: tuple[tuple[int, int], ...]
    speakers: frozenset[str]
    aspects: frozenset[Aspect]
    scene_ids: frozenset[int]


def align_shots(shots: Sequence[Shot], ann: EpisodeAnnotation) -> list[ShotContext]:
    """Attach overlapping sentences to each shot (empty context if none)."""
    contexts: list[ShotContext] = []
    for shot in shots:
        sentence_ids: list[tuple[int, int]] = []
        speakers: set[str] = set()
        aspects: set[Aspect] = set()
        scene_ids: set[int] = set()
        for sentence in ann.sentences:
            if max(shot.start_ms, sentence.start_ms) < min(shot.end_ms, sentence.end_ms):
                sentence_ids.append(sentence.key)
                if sentence.speaker is not None:
                    speakers.add(sentence.speaker)
                aspects |= sentence.aspects
                scene_ids.add(ann.scene_index[sentence.key])
        contexts.append(
            ShotContext(
                shot_index=shot.shot_index,
                sentence_ids=tuple(sentence_ids),
                speakers=frozenset(speakers),
                aspects=frozenset(aspects),
                scene_ids=frozenset(scene_ids),
            )
        )
    return contexts


def speaking_time(ann: EpisodeAnnotation, character: str) -> float:
    """Minutes the character spends speaking (sum of sentence durations)."""
    total_ms = sum(s.duration_ms for s in ann.sentences if s.speaker == character)
    return total_ms / MS_PER_MINUTE


def speaking_times(anns: Iterable[EpisodeAnnotation]) -> dict[str, float]:
    """Total speaking minutes per character across episodes (no stage directions)."""
    totals: dict[str, float] = {}
    for ann in anns:
        for s in ann.sentences:
            if s.speaker is not None:
                totals[s.speaker] = totals.get(s.speaker, 0.0) + s.duration_ms
    return {name: ms / MS_PER_MINUTE for name, ms in totals.items()}


def aspect_scene_counts(ann: EpisodeAnnotation) -> dict[Aspect, int]:
    """How many scenes carry each aspect (a scene counts once per aspect)."""
    counts: dict[Aspect, int] = {}
    for scene_id in ann.scene_ids():
        for aspect in ann.scene_aspects(scene_id):
            counts[aspect] = counts.get(aspect, 0) + 1
    return counts


def main_cast(anns: Iterable[EpisodeAnnotation], top_k: int = DEFAULT_TOP_K_CAST) -> list[str]:
    """Characters ranked by total speaking time, descending; ties break
    lexicographically; top_k kept."""
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    totals = speaking_times(anns)
    ranked = sorted(totals, key=lambda name: (-totals[name], name))
    return ranked[:top_k]


def write_contexts(contexts: Iterable[ShotContext], path: Path) -> None:
    lines = ["\t".join(CONTEXT_COLUMNS)]
    for ctx in contexts:
        lines.append(
            "\t".join(
                (
                    str(ctx.shot_index),
                    ";".join(sorted(ctx.speakers)),
                    format_aspect_set(ctx.aspects),
                    ";".join(str(i) for i in sorted(ctx.scene_ids)),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_contexts(path: Path) -> list[ShotContext]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != list(CONTEXT_COLUMNS):
        raise SchemaError(f"{path}: bad or missing context header")
    contexts: list[ShotContext] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(CONTEXT_COLUMNS):
            raise ParseError(
                f"expected {len(CONTEXT_COLUMNS)} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        index_s, speakers_s, aspects_s, scenes_s = fields
        try:
            shot_index = int(index_s)
            scene_ids = frozenset(int(p) for p in scenes_s.split(";") if p)
        except ValueError:
            raise ParseError("bad integer field", path=path, line=line_no) from None
        aspects = parse_aspect_set(aspects_s) if aspects_s.strip() else frozenset()
        contexts.append(
            ShotContext(
                shot_index=shot_index,
                sentence_ids=(),
                speakers=frozenset(p for p in speakers_s.split(";") if p),
                aspects=aspects,
                scene_ids=scene_ids,
            )
        )
    return contexts

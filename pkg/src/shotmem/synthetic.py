"""Synthetic workspace generator with planted ground truth.

Real episode video and the memorability training corpus cannot ship with
the repository, so end-to-end runs use a generated episode in which the
interesting structure is planted and therefore known:

* a cast whose speaking time strictly decreases in a chosen order, and
* scene-level feature magnitudes arranged so that Motive scenes carry
  the most memorable footage, with per-character levels following the
  cast order.

Features live on a single latent direction: a frame at latent level L
has mean ``L * spread * u`` plus isotropic noise, and a training video
at level L is scored ``base + slope * L``. A regressor that recovers
this mapping will reproduce the planted orderings from the pipeline's
own artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Aspect
from .features import FeatureTable, FrameFeature, sample_times, write_feature_table
from .regression import write_training_scores
from .shots import FrameHistogramSequence, write_histograms
from .timecode import format_timestamp
from .workspace import Workspace

EPISODE_ID = "s01e01"

SENTENCE_MS = 5000
SHOT_MS = 2000
HIST_INTERVAL_MS = 200
HIST_BINS = 64

SCORE_BASE = 0.35
SCORE_SLOPE = 0.4
FEATURE_SPREAD = 3.0
FEATURE_NOISE = 0.12

_WORDS = ("the", "trace", "points", "back", "to", "night", "shift", "report")


@dataclass(frozen=True)
class SceneSpec:
    scene_id: int
    speaker: str
    aspect: Aspect
    level: float
    n_spoken: int = 6
    n_stage: int = 2

    @property
    def n_sentences(self) -> int:
        return self.n_spoken + self.n_stage

    @property
    def duration_ms(self) -> int:
        return self.n_sentences * SENTENCE_MS


@dataclass(frozen=True)
class SyntheticTruth:
    episode_id: str
    cast_order: tuple[str, ...]  # by planted speaking time, descending
    scenes: tuple[SceneSpec, ...]
    dim: int
    latent_direction: np.ndarray

    @property
    def duration_ms(self) -> int:
        return sum(s.duration_ms for s in self.scenes)


def default_scene_plan() -> tuple[tuple[str, ...], list[SceneSpec]]:
    """Five characters, 15 scenes; Motive scenes are the high-level ones."""
    cast = ("Adler", "Brooks", "Castillo", "Drummond", "Eng")
    scene_counts = (5, 4, 3, 2, 1)
    levels = (0.78, 0.65, 0.52, 0.39, 0.26)
    fill_aspects = (Aspect.VICTIM, Aspect.CRIME_SCENE, Aspect.EVIDENCE, Aspect.DEATH_CAUSE)
    specs: list[tuple[str, Aspect, float]] = []
    fill_i = 0
    for char, count, level in zip(cast, scene_counts, levels):
        for j in range(count):
            if char == cast[0] and j < 2:
                specs.append((char, Aspect.MOTIVE, 0.95))
            elif char == cast[-1]:
                specs.append((char, Aspect.NONE, level))
            else:
                specs.append((char, fill_aspects[fill_i % len(fill_aspects)], level))
                fill_i += 1
    # Interleave so no character's scenes clump at one end of the episode.
    order = sorted(range(len(specs)), key=lambda i: (i % 3, i))
    scenes = [
        SceneSpec(scene_id=k + 1, speaker=specs[i][0], aspect=specs[i][1], level=specs[i][2])
        for k, i in enumerate(order)
    ]
    return cast, scenes


def _sentence_text(scene: SceneSpec, slot: int, stage: bool) -> str:
    words = [
        _WORDS[(scene.scene_id + slot + k) % len(_WORDS)]
        for k in range(3)
    ]
    tag = "camera holds on" if stage else "case note"
    return f"{tag} {' '.join(words)} s{scene.scene_id}l{slot}"


def _write_corpora(ws: Workspace, truth: SyntheticTruth) -> None:
    word_lines = [
        "caseID\tsentID\tspeaker\tword\tstart\tend\tkiller_gold\tsuspect_gold\tother_gold"
    ]
    scene_lines = ["sceneID\tscreenplay\taspect"]
    sent_id = 0
    t = 0
    for scene in truth.scenes:
        texts = []
        for slot in range(scene.n_sentences):
            stage = slot >= scene.n_spoken
            sent_id += 1
            text = _sentence_text(scene, slot, stage)
            texts.append(text)
            speaker = "None" if stage else scene.speaker
            start, end = format_timestamp(t), format_timestamp(t + SENTENCE_MS)
            for word in text.split(" "):
                word_lines.append(
                    f"1\t{sent_id}\t{speaker}\t{word}\t{start}\t{end}\t0\t0\t0"
                )
            t += SENTENCE_MS
        scene_lines.append(
            f"{scene.scene_id}\t{' | '.join(texts)}\t{scene.aspect.value}"
        )
    ep = truth.episode_id
    ws.source_dir(ep).mkdir(parents=True, exist_ok=True)
    ws.words_path(ep).write_text("\n".join(word_lines) + "\n", encoding="utf-8", newline="\n")
    ws.scenes_path(ep).write_text("\n".join(scene_lines) + "\n", encoding="utf-8", newline="\n")
    roles = [f"{name}\tother" for name in truth.cast_order]
    ws.cast_roles_path(ep).write_text("\n".join(roles) + "\n", encoding="utf-8", newline="\n")


def _scene_level_at(truth: SyntheticTruth, t_ms: int) -> float:
    t = 0
    for scene in truth.scenes:
        t += scene.duration_ms
        if t_ms < t:
            return scene.level
    return truth.scenes[-1].level


def _write_histograms(ws: Workspace, truth: SyntheticTruth, rng: np.random.Generator) -> None:
    n_shots = truth.duration_ms // SHOT_MS
    frames_per_shot = SHOT_MS // HIST_INTERVAL_MS
    rows = []
    prev = None
    for _ in range(n_shots):
        hist = rng.dirichlet(np.ones(HIST_BINS))
        # Force a clear L1 jump at every planted cut.
        while prev is not None and np.abs(hist - prev).sum() <= 0.7:
            hist = rng.dirichlet(np.ones(HIST_BINS))
        rows.extend([hist] * frames_per_shot)
        prev = hist
    seq = FrameHistogramSequence(
        frame_interval_ms=HIST_INTERVAL_MS, histograms=np.array(rows)
    )
    write_histograms(seq, ws.histograms_path(truth.episode_id))


def _frame_vector(
    truth: SyntheticTruth, level: float, rng: np.random.Generator
) -> np.ndarray:
    mean = level * FEATURE_SPREAD * truth.latent_direction
    return (mean + FEATURE_NOISE * rng.standard_normal(truth.dim)).astype(np.float32)


def _write_episode_features(
    ws: Workspace, truth: SyntheticTruth, rng: np.random.Generator, fps: float
) -> None:
    frames = [
        FrameFeature(
            timestamp_ms=t,
            vector=_frame_vector(truth, _scene_level_at(truth, t), rng),
        )
        for t in sample_times(truth.duration_ms, fps)
    ]
    table = FeatureTable(
        episode_id=truth.episode_id,
        dim=truth.dim,
        frames=frames,
        meta={"encoder": "synthetic-latent-v1"},
    )
    write_feature_table(table, ws.features_path(truth.episode_id))


def _write_training_data(
    ws: Workspace,
    truth: SyntheticTruth,
    rng: np.random.Generator,
    n_videos: int,
    frames_per_video: int,
) -> None:
    ws.training_features_dir.mkdir(parents=True, exist_ok=True)
    scores = []
    for v in range(n_videos):
        level = rng.uniform(0.0, 1.0)
        video_id = f"v{v:03d}"
        frames = [
            FrameFeature(timestamp_ms=t * 333, vector=_frame_vector(truth, level, rng))
            for t in range(frames_per_video)
        ]
        table = FeatureTable(episode_id=video_id, dim=truth.dim, frames=frames)
        write_feature_table(table, ws.training_features_dir / f"{video_id}.memfeat")
        score = SCORE_BASE + SCORE_SLOPE * level + rng.normal(0.0, 0.005)
        scores.append((video_id, float(np.clip(score, 0.0, 1.0))))
    write_training_scores(scores, ws.training_scores_path)


def generate_workspace(
    root: Path,
    seed: int = 2024,
    dim: int = 8,
    fps: float = 3.0,
    n_videos: int = 60,
    frames_per_video: int = 9,
) -> SyntheticTruth:
    """Populate ``root`` with a complete synthetic source workspace."""
    rng = np.random.default_rng(seed)
    cast, scenes = default_scene_plan()
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    truth = SyntheticTruth(
        episode_id=EPISODE_ID,
        cast_order=cast,
        scenes=tuple(scenes),
        dim=dim,
        latent_direction=direction,
    )
    ws = Workspace(Path(root))
    ws.root.mkdir(parents=True, exist_ok=True)
    (ws.root / "training").mkdir(exist_ok=True)
    _write_corpora(ws, truth)
    _write_histograms(ws, truth, rng)
    _write_episode_features(ws, truth, rng, fps)
    _write_training_data(ws, truth, rng, n_videos, frames_per_video)
    return truth

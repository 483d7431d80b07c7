"""Stage orchestration: etl, shots, train, score, smooth, align, analyze, report.

Each stage reads its inputs from the workspace, writes its artifacts and
records them in the manifest. Outputs are deterministic functions of the
inputs and parameters, so re-running a stage yields byte-identical files.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import align as align_mod
from . import analytics, corpus, features, regression, signals, shots, svgplot
from .errors import DimensionMismatchError, StageInputError, ValidationError
from .workspace import Workspace

logger = logging.getLogger(__name__)

STAGES = ("etl", "shots", "train", "score", "smooth", "align", "analyze", "report")


@dataclass(frozen=True)
class PipelineConfig:
    workspace: Path
    episode: str | None = None
    windows: tuple[int, ...] = (15, 155)  # windows drawn in report plots
    sweep: tuple[int, int, int] = signals.DEFAULT_SWEEP
    k_frames: int = features.DEFAULT_K_FRAMES
    fps: float = features.DEFAULT_RATE_PER_S
    threshold: float = shots.DEFAULT_THRESHOLD
    min_shot_ms: int = shots.DEFAULT_MIN_SHOT_MS
    top_k_cast: int = align_mod.DEFAULT_TOP_K_CAST
    force: bool = False


def run_stage(stage: str, config: PipelineConfig) -> list[Path]:
    """Run one pipeline stage; returns the artifact paths written."""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r} (expected one of {STAGES})")
    ws = Workspace(config.workspace)
    runner = {
        "etl": _run_etl,
        "shots": _run_shots,
        "train": _run_train,
        "score": _run_score,
        "smooth": _run_smooth,
        "align": _run_align,
        "analyze": _run_analyze,
        "report": _run_report,
    }[stage]
    written = runner(ws, config)
    for path in written:
        logger.info("%s: wrote %s", stage, path)
    return written


def run_pipeline(config: PipelineConfig) -> list[Path]:
    """Run every stage in order; convenience for fully populated workspaces."""
    written: list[Path] = []
    for stage in STAGES:
        written.extend(run_stage(stage, config))
    return written


def _selected_episodes(ws: Workspace, config: PipelineConfig) -> list[str]:
    if config.episode is not None:
        return [config.episode]
    eps = ws.episodes()
    if not eps:
        raise StageInputError(f"no episodes found under {ws.root / 'episodes'}")
    return eps


def _run_etl(ws: Workspace, config: PipelineConfig) -> list[Path]:
    written = []
    for ep in _selected_episodes(ws, config):
        words_p, scenes_p = ws.words_path(ep), ws.scenes_path(ep)
        ws.require_inputs("etl", [words_p, scenes_p])
        out = ws.annotation_path(ep)
        ws.guard_outputs([out], config.force)
        tokens = corpus.parse_word_corpus(words_p.read_text(encoding="utf-8"), path=words_p)
        sentences = corpus.aggregate_to_sentences(tokens)
        scene_list = corpus.parse_scene_corpus(
            scenes_p.read_text(encoding="utf-8"), path=scenes_p
        )
        membership = corpus.disaggregate_scenes(scene_list)
        roles_p = ws.cast_roles_path(ep)
        roles = (
            corpus.parse_cast_roles(roles_p.read_text(encoding="utf-8"), path=roles_p)
            if roles_p.is_file()
            else {}
        )
        ann = corpus.merge_corpora(sentences, membership, episode_id=ep, cast_roles=roles)
        ann = corpus.augment_aspects(ann)
        out.parent.mkdir(parents=True, exist_ok=True)
        corpus.write_annotation(ann, out)
        inputs = [words_p, scenes_p] + ([roles_p] if roles_p.is_file() else [])
        ws.record("etl", [out], inputs=inputs)
        written.append(out)
    return written


def _run_shots(ws: Workspace, config: PipelineConfig) -> list[Path]:
    written = []
    for ep in _selected_episodes(ws, config):
        out = ws.shots_path(ep)
        ws.guard_outputs([out], config.force)
        src = ws.source_shots_path(ep)
        hist_p = ws.histograms_path(ep)
        if src.is_file():
            shot_list = shots.read_shot_list(src, strict=True)
            inputs = [src]
            params = {"source": "interchange"}
        elif hist_p.is_file():
            seq = shots.read_histograms(hist_p)
            shot_list = shots.detect_shots_histogram(
                seq,
                episode_id=ep,
                threshold=config.threshold,
                min_shot_ms=config.min_shot_ms,
            )
            inputs = [hist_p]
            params = {
                "source": "histogram-fallback",
                "threshold": config.threshold,
                "min_shot_ms": config.min_shot_ms,
            }
        else:
            raise StageInputError(
                f"stage shots: episode {ep}: neither {src} nor {hist_p} exists"
            )
        if not shot_list:
            raise ValidationError(f"episode {ep}: empty shot list")
        out.parent.mkdir(parents=True, exist_ok=True)
        shots.write_shot_list(shot_list, out)
        ws.record("shots", [out], inputs=inputs, params=params)
        written.append(out)
    return written


def _run_train(ws: Workspace, config: PipelineConfig) -> list[Path]:
    scores_p = ws.training_scores_path
    ws.require_inputs("train", [scores_p])
    if not ws.training_features_dir.is_dir():
        raise StageInputError(
            f"stage train: missing training features directory {ws.training_features_dir}"
        )
    out = ws.model_path
    ws.guard_outputs([out], config.force)
    train = regression.load_training_set(scores_p, ws.training_features_dir)
    model = regression.fit(train)
    if not model.converged:
        logger.warning("train: evidence maximization hit max_iter without converging")
    out.parent.mkdir(parents=True, exist_ok=True)
    regression.write_model(model, out)
    ws.record(
        "train",
        [out],
        inputs=[scores_p],
        params={"n_rows": train.n, "dim": train.dim, "iterations": model.iterations},
    )
    return [out]


def _check_frame_spacing(table, fps: float, episode_id: str) -> None:
    # Offset-independent sanity check that the features were sampled at the
    # configured rate; a mismatch degrades representative-frame selection.
    times = table.timestamps
    if times.shape[0] < 2:
        return
    spacing = float(np.median(np.diff(times)))
    expected = 1000.0 / fps
    if abs(spacing - expected) > 0.2 * expected:
        logger.warning(
            "episode %s: median frame spacing %.0f ms does not match --fps %g "
            "(expected ~%.0f ms)",
            episode_id,
            spacing,
            fps,
            expected,
        )


SCORE_COLUMNS = ("shot_index", "score", "variance", "n_frames")


def write_scores(score_list, path: Path) -> None:
    lines = ["\t".join(SCORE_COLUMNS)]
    for s in score_list:
        lines.append(f"{s.shot_index}\t{s.score!r}\t{s.variance!r}\t{s.n_frames}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_scores(path: Path) -> list[regression.ShotScore]:
    from .errors import ParseError, SchemaError

    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != list(SCORE_COLUMNS):
        raise SchemaError(f"{path}: bad or missing score header")
    out = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", path=path, line=line_no)
        try:
            out.append(
                regression.ShotScore(
                    shot_index=int(fields[0]),
                    score=float(fields[1]),
                    variance=float(fields[2]),
                    n_frames=int(fields[3]),
                )
            )
        except ValueError:
            raise ParseError("bad numeric field", path=path, line=line_no) from None
    return out


def _run_score(ws: Workspace, config: PipelineConfig) -> list[Path]:
    model_p = ws.model_path
    ws.require_inputs("score", [model_p])
    model = regression.read_model(model_p)
    written = []
    for ep in _selected_episodes(ws, config):
        shots_p, feat_p = ws.shots_path(ep), ws.features_path(ep)
        ws.require_inputs("score", [shots_p, feat_p])
        out = ws.scores_path(ep)
        ws.guard_outputs([out], config.force)
        shot_list = shots.read_shot_list(shots_p)
        table = features.read_feature_table(feat_p, episode_id=ep)
        if table.dim != model.dim:
            raise DimensionMismatchError(
                model.dim, table.dim, context=f"episode {ep}: model vs features"
            )
        _check_frame_spacing(table, config.fps, ep)
        matrix = features.shot_frame_matrix(shot_list, table, k=config.k_frames)
        score_list = [
            regression.score_shot(model, vectors, shot_index=idx)
            for idx, vectors in matrix.items()
        ]
        write_scores(score_list, out)
        ws.record(
            "score",
            [out],
            inputs=[model_p, shots_p, feat_p],
            params={"k_frames": config.k_frames},
        )
        written.append(out)
    return written


def _run_smooth(ws: Workspace, config: PipelineConfig) -> list[Path]:
    written = []
    n_min, n_max, step = config.sweep
    for ep in _selected_episodes(ws, config):
        shots_p, scores_p = ws.shots_path(ep), ws.scores_path(ep)
        ws.require_inputs("smooth", [shots_p, scores_p])
        out = ws.signal_path(ep)
        ws.guard_outputs([out], config.force)
        shot_list = shots.read_shot_list(shots_p)
        score_list = read_scores(scores_p)
        signal = signals.build_signal(shot_list, score_list)
        smoothed = signals.sweep_windows(signal, n_min, n_max, step)
        signals.write_signal(signal, smoothed, out)
        ws.record(
            "smooth",
            [out],
            inputs=[shots_p, scores_p],
            params={"sweep": f"{n_min}:{n_max}:{step}"},
        )
        written.append(out)
    return written


def _run_align(ws: Workspace, config: PipelineConfig) -> list[Path]:
    written = []
    for ep in _selected_episodes(ws, config):
        shots_p, ann_p = ws.shots_path(ep), ws.annotation_path(ep)
        ws.require_inputs("align", [shots_p, ann_p])
        out = ws.contexts_path(ep)
        ws.guard_outputs([out], config.force)
        shot_list = shots.read_shot_list(shots_p)
        ann = corpus.read_annotation(ann_p, episode_id=ep)
        contexts = align_mod.align_shots(shot_list, ann)
        align_mod.write_contexts(contexts, out)
        ws.record("align", [out], inputs=[shots_p, ann_p])
        written.append(out)
    return written


def _run_analyze(ws: Workspace, config: PipelineConfig) -> list[Path]:
    episodes = _selected_episodes(ws, config)
    anns = []
    records = []
    for ep in episodes:
        ann_p, ctx_p, scores_p = (
            ws.annotation_path(ep),
            ws.contexts_path(ep),
            ws.scores_path(ep),
        )
        ws.require_inputs("analyze", [ann_p, ctx_p, scores_p])
        anns.append(corpus.read_annotation(ann_p, episode_id=ep))
        contexts = align_mod.read_contexts(ctx_p)
        score_list = read_scores(scores_p)
        records.extend(analytics.shot_records(ep, contexts, score_list))

    out_dir = ws.reports_dir
    outputs = {
        "speaking": out_dir / "cast_speaking_time.tsv",
        "aspect_counts": out_dir / "aspect_scene_counts.tsv",
        "by_character": out_dir / "memorability_by_character.tsv",
        "by_aspect": out_dir / "memorability_by_aspect.tsv",
        "vs": out_dir / "screen_time_vs_memorability.tsv",
    }
    ws.guard_outputs(outputs.values(), config.force)
    out_dir.mkdir(parents=True, exist_ok=True)

    minutes = align_mod.speaking_times(anns)
    cast = align_mod.main_cast(anns, top_k=config.top_k_cast)
    lines = ["character\tminutes"]
    lines += [f"{name}\t{minutes[name]:.6g}" for name in cast]
    outputs["speaking"].write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    counts: dict[corpus.Aspect, int] = {}
    for ann in anns:
        for aspect, count in align_mod.aspect_scene_counts(ann).items():
            counts[aspect] = counts.get(aspect, 0) + count
    lines = ["aspect\tscene_count"]
    lines += [f"{a.value}\t{counts.get(a, 0)}" for a in corpus.Aspect]
    outputs["aspect_counts"].write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    by_char = analytics.memorability_by_character(records, cast)
    analytics.write_summaries(by_char, outputs["by_character"])
    by_aspect = analytics.memorability_by_aspect(records)
    analytics.write_summaries(by_aspect, outputs["by_aspect"])

    rows, rho = analytics.screen_time_vs_memorability(by_char, minutes)
    lines = [f"# spearman_rho\t{rho!r}", "character\tspeaking_minutes\tmedian_memorability"]
    lines += [f"{name}\t{m:.6g}\t{med:.6g}" for name, m, med in rows]
    outputs["vs"].write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    inputs = []
    for ep in episodes:
        inputs += [ws.annotation_path(ep), ws.contexts_path(ep), ws.scores_path(ep)]
    ws.record(
        "analyze",
        list(outputs.values()),
        inputs=inputs,
        params={"episodes": ",".join(episodes), "top_k_cast": config.top_k_cast},
    )
    return list(outputs.values())


def _run_report(ws: Workspace, config: PipelineConfig) -> list[Path]:
    written = []
    for ep in _selected_episodes(ws, config):
        signal_p, ctx_p = ws.signal_path(ep), ws.contexts_path(ep)
        ws.require_inputs("report", [signal_p, ctx_p])
        out = ws.episode_reports_dir(ep) / "signal.svg"
        ws.guard_outputs([out], config.force)
        svg = emit_signal_svg(ws, ep, config.windows)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(svg, encoding="utf-8", newline="\n")
        ws.record(
            "report",
            [out],
            inputs=[signal_p, ctx_p],
            params={"windows": ",".join(map(str, config.windows))},
        )
        written.append(out)

    summary_inputs = {
        "speaking": ws.reports_dir / "cast_speaking_time.tsv",
        "aspect_counts": ws.reports_dir / "aspect_scene_counts.tsv",
        "by_character": ws.reports_dir / "memorability_by_character.tsv",
        "by_aspect": ws.reports_dir / "memorability_by_aspect.tsv",
        "vs": ws.reports_dir / "screen_time_vs_memorability.tsv",
    }
    ws.require_inputs("report", summary_inputs.values())
    svg_outputs = {
        name: path.with_suffix(".svg") for name, path in summary_inputs.items()
    }
    ws.guard_outputs(svg_outputs.values(), config.force)

    labels, values = _read_two_column(summary_inputs["speaking"])
    svg_outputs["speaking"].write_text(
        svgplot.bar_chart(labels, values, "Speaking time per main cast member (min)"),
        encoding="utf-8", newline="\n",
    )
    labels, values = _read_two_column(summary_inputs["aspect_counts"])
    svg_outputs["aspect_counts"].write_text(
        svgplot.bar_chart(labels, values, "Scenes per aspect value"),
        encoding="utf-8", newline="\n",
    )
    for name, title in (
        ("by_character", "Shot memorability by main character"),
        ("by_aspect", "Shot memorability by scene aspect"),
    ):
        summaries = [
            s for s in analytics.read_summaries(summary_inputs[name])
            if s.season == analytics.ALL_SEASONS and s.n > 0
        ]
        svg_outputs[name].write_text(
            svgplot.boxen_chart(summaries, title), encoding="utf-8", newline="\n"
        )
    rows, rho = _read_vs_table(summary_inputs["vs"])
    svg_outputs["vs"].write_text(
        svgplot.scatter_chart(rows, rho, "Screen time vs memorability"),
        encoding="utf-8", newline="\n",
    )
    ws.record("report", list(svg_outputs.values()), inputs=list(summary_inputs.values()))
    written.extend(svg_outputs.values())
    return written


def emit_signal_svg(ws: Workspace, episode_id: str, windows: tuple[int, ...]) -> str:
    """Render one episode's signal chart from workspace artifacts."""
    raw, smoothed = signals.read_signal(ws.signal_path(episode_id), episode_id=episode_id)
    available = {n: sig for n, sig in smoothed.items() if n in set(windows)}
    missing = set(windows) - set(smoothed)
    if missing:
        raise ValidationError(
            f"episode {episode_id}: windows {sorted(missing)} not in the sweep "
            f"(have {sorted(smoothed)})"
        )
    contexts = align_mod.read_contexts(ws.contexts_path(episode_id))
    shot_list = shots.read_shot_list(ws.shots_path(episode_id))
    spans = []
    ctx_by_index = {c.shot_index: c for c in contexts}
    for shot in shot_list:
        ctx = ctx_by_index.get(shot.shot_index)
        if ctx is not None:
            spans.append((shot.start_ms, shot.end_ms, ctx.aspects))
    return svgplot.signal_chart(raw, available, band_spans=spans)


def _read_two_column(path: Path) -> tuple[list[str], list[float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    labels, values = [], []
    for line in lines[1:]:
        if not line.strip():
            continue
        label, value = line.split("\t")
        labels.append(label)
        values.append(float(value))
    return labels, values


def _read_vs_table(path: Path) -> tuple[list[tuple[str, float, float]], float]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rho = float(lines[0].split("\t")[1])
    rows = []
    for line in lines[2:]:
        if not line.strip():
            continue
        name, minutes, median = line.split("\t")
        rows.append((name, float(minutes), float(median)))
    return rows, rho

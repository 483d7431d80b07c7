import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from shotmem import cli
from shotmem.errors import OutputExistsError, StageInputError
from shotmem.features import FeatureTable, FrameFeature, write_feature_table
from shotmem.pipeline import PipelineConfig, STAGES, run_stage
from shotmem.regression import write_training_scores
from shotmem.workspace import Workspace, sha256_file

EPISODE = "s01e08"
DIM = 4


def build_workspace(root: Path, data_dir: Path) -> Workspace:
    """Small real workspace around the Table 1 fixture corpus."""
    ws = Workspace(root)
    src = ws.source_dir(EPISODE)
    src.mkdir(parents=True)
    for name in ("words", "scenes", "cast_roles"):
        shutil.copy(data_dir / f"table1_{name}.tsv", src / f"{name}.tsv")

    shot_rows = [(0, 36000, 42000), (1, 42000, 48000), (2, 48000, 54000), (3, 54000, 57000)]
    lines = ["episode_id\tshot_index\tstart_ms\tend_ms"]
    lines += [f"{EPISODE}\t{i}\t{a}\t{b}" for i, a, b in shot_rows]
    ws.source_shots_path(EPISODE).write_text("\n".join(lines) + "\n")

    rng = np.random.default_rng(0)
    frames = [
        FrameFeature(timestamp_ms=t, vector=rng.standard_normal(DIM).astype(np.float32))
        for t in range(36000, 57000, 333)
    ]
    write_feature_table(
        FeatureTable(episode_id=EPISODE, dim=DIM, frames=frames),
        ws.features_path(EPISODE),
    )

    ws.training_features_dir.mkdir(parents=True)
    scores = []
    for v in range(10):
        vid = f"v{v:02d}"
        frames = [
            FrameFeature(timestamp_ms=i * 333, vector=rng.standard_normal(DIM).astype(np.float32))
            for i in range(3)
        ]
        write_feature_table(
            FeatureTable(episode_id=vid, dim=DIM, frames=frames),
            ws.training_features_dir / f"{vid}.memfeat",
        )
        scores.append((vid, float(rng.uniform(0.7, 0.95))))
    write_training_scores(scores, ws.training_scores_path)
    return ws


@pytest.fixture
def workspace(tmp_path, data_dir):
    return build_workspace(tmp_path / "ws", data_dir)


def config(ws, **kw):
    kw.setdefault("sweep", (3, 5, 2))
    kw.setdefault("windows", (3, 5))
    return PipelineConfig(workspace=ws.root, episode=EPISODE, **kw)


def run_all(ws, **kw):
    cfg = config(ws, **kw)
    for stage in STAGES:
        run_stage(stage, cfg)
    return cfg


class TestStages:
    def test_etl_matches_golden_byte_identical(self, workspace, data_dir):
        run_stage("etl", config(workspace))
        produced = workspace.annotation_path(EPISODE).read_bytes()
        golden = (data_dir / "table1_annotation.tsv").read_bytes()
        assert produced == golden

    def test_score_requires_train_and_shots(self, workspace):
        with pytest.raises(StageInputError, match="brr.model"):
            run_stage("score", config(workspace))

    def test_smooth_requires_scores(self, workspace):
        run_stage("etl", config(workspace))
        with pytest.raises(StageInputError, match="scores.tsv"):
            run_stage("smooth", config(workspace))

    def test_full_pipeline_writes_all_artifacts(self, workspace):
        run_all(workspace)
        ws = workspace
        for path in (
            ws.annotation_path(EPISODE),
            ws.shots_path(EPISODE),
            ws.model_path,
            ws.scores_path(EPISODE),
            ws.signal_path(EPISODE),
            ws.contexts_path(EPISODE),
            ws.reports_dir / "memorability_by_aspect.tsv",
            ws.episode_reports_dir(EPISODE) / "signal.svg",
            ws.reports_dir / "cast_speaking_time.svg",
        ):
            assert path.is_file(), path

    def test_overwrite_refused_without_force(self, workspace):
        run_stage("etl", config(workspace))
        with pytest.raises(OutputExistsError, match="annotation.tsv"):
            run_stage("etl", config(workspace))

    def test_rerun_with_force_is_byte_identical(self, workspace):
        run_all(workspace)
        ws = workspace
        tracked = [
            ws.annotation_path(EPISODE),
            ws.shots_path(EPISODE),
            ws.model_path,
            ws.scores_path(EPISODE),
            ws.signal_path(EPISODE),
            ws.contexts_path(EPISODE),
            ws.reports_dir / "memorability_by_character.tsv",
            ws.episode_reports_dir(EPISODE) / "signal.svg",
        ]
        before = {p: sha256_file(p) for p in tracked}
        run_all(ws, force=True)
        after = {p: sha256_file(p) for p in tracked}
        assert before == after

    def test_dimension_mismatch_exit_code_and_message(self, workspace, capsys):
        run_stage("etl", config(workspace))
        run_stage("shots", config(workspace))
        run_stage("train", config(workspace))
        bad = FeatureTable(
            episode_id=EPISODE,
            dim=DIM + 2,
            frames=[FrameFeature(timestamp_ms=0, vector=np.zeros(DIM + 2, dtype=np.float32))],
        )
        write_feature_table(bad, workspace.features_path(EPISODE))
        rc = cli.main(
            ["score", "--workspace", str(workspace.root), "--episode", EPISODE]
        )
        assert rc == cli.EXIT_VALIDATION
        err = capsys.readouterr().err
        assert f"expected {DIM}" in err and f"got {DIM + 2}" in err

    def test_fps_mismatch_warns(self, workspace, caplog):
        rng = np.random.default_rng(5)
        frames = [
            FrameFeature(timestamp_ms=t, vector=rng.standard_normal(DIM).astype(np.float32))
            for t in range(36000, 57000, 1000)
        ]
        write_feature_table(
            FeatureTable(episode_id=EPISODE, dim=DIM, frames=frames),
            workspace.features_path(EPISODE),
        )
        run_stage("etl", config(workspace))
        run_stage("shots", config(workspace))
        run_stage("train", config(workspace))
        with caplog.at_level("WARNING"):
            run_stage("score", config(workspace, fps=3.0))
        assert any("frame spacing" in r.message for r in caplog.records)

    def test_histogram_fallback_when_no_shot_file(self, workspace, tmp_path):
        from shotmem.shots import FrameHistogramSequence, write_histograms

        workspace.source_shots_path(EPISODE).unlink()
        rng = np.random.default_rng(1)
        rows = []
        for _ in range(3):  # three 2 s shots at 200 ms spacing
            hist = rng.dirichlet(np.ones(64))
            rows.extend([hist] * 10)
        write_histograms(
            FrameHistogramSequence(frame_interval_ms=200, histograms=np.array(rows)),
            workspace.histograms_path(EPISODE),
        )
        run_stage("shots", config(workspace))
        text = workspace.shots_path(EPISODE).read_text()
        assert len(text.splitlines()) == 4  # header + 3 shots

    def test_manifest_records_inputs_and_stage(self, workspace):
        run_stage("etl", config(workspace))
        entries = workspace.read_manifest()
        [entry] = [e for e in entries if e.path.endswith("annotation.tsv")]
        assert entry.stage == "etl"
        assert "words.tsv@" in entry.params
        assert "scenes.tsv@" in entry.params
        assert entry.sha256 == sha256_file(workspace.annotation_path(EPISODE))


class TestCli:
    def test_exit_codes(self, workspace):
        assert cli.main(["etl", "--workspace", str(workspace.root)]) == cli.EXIT_OK
        # second run refuses to overwrite
        assert (
            cli.main(["etl", "--workspace", str(workspace.root)]) == cli.EXIT_VALIDATION
        )
        # missing model file is an input error
        assert (
            cli.main(["score", "--workspace", str(workspace.root)]) == cli.EXIT_INPUT
        )

    def test_missing_workspace_flag(self):
        assert cli.main(["etl"]) == cli.EXIT_INPUT

    def test_config_file_with_flag_override(self, workspace, tmp_path):
        ini = tmp_path / "cfg.ini"
        ini.write_text(
            "[shotmem]\n"
            f"workspace = {workspace.root}\n"
            f"episode = {EPISODE}\n"
            "sweep = 3:5:2\n"
            "window = 3,5\n"
        )
        assert cli.main(["etl", "--config", str(ini)]) == cli.EXIT_OK
        assert workspace.annotation_path(EPISODE).is_file()
        # flag overrides config: force re-run succeeds
        assert cli.main(["etl", "--config", str(ini), "--force"]) == cli.EXIT_OK

    def test_validate_subcommands(self, workspace, capsys):
        rc = cli.main(["validate", "features", str(workspace.features_path(EPISODE))])
        assert rc == cli.EXIT_OK
        assert "dim=4" in capsys.readouterr().out
        rc = cli.main(["validate", "shots", str(workspace.source_shots_path(EPISODE))])
        assert rc == cli.EXIT_OK

    def test_validate_rejects_bad_file(self, tmp_path):
        bad = tmp_path / "bad.memfeat"
        bad.write_text("NOPE\n")
        assert cli.main(["validate", "features", str(bad)]) == cli.EXIT_VALIDATION

    def test_console_script_subprocess(self, workspace):
        proc = subprocess.run(
            [sys.executable, "-m", "shotmem.cli", "etl", "--workspace", str(workspace.root)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "annotation.tsv" in proc.stdout

    def test_synth_subcommand(self, tmp_path):
        rc = cli.main(["synth", "--workspace", str(tmp_path / "sw"), "--seed", "7"])
        assert rc == cli.EXIT_OK
        assert (tmp_path / "sw" / "episodes" / "s01e01" / "source" / "words.tsv").is_file()

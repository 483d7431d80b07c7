"""Flat-file workspace with a provenance manifest.

Layout under the workspace root:

    training/scores.tsv            video_id\\tscore pairs
    training/features/<id>.memfeat per-video training features
    model/brr.model                fitted regressor
    episodes/<ep>/source/...       stage inputs (corpora, features, shots)
    episodes/<ep>/...              derived per-episode artifacts
    episodes/<ep>/reports/         per-episode plots
    reports/                       series-level tables and plots
    manifest.tsv                   path\\tsha256\\tstage\\tparams

Every derived file gets a manifest line naming the stage, its parameters
and the sha256 of each input it was computed from. Stages refuse to
overwrite existing artifacts unless forced.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .errors import OutputExistsError, StageInputError

MANIFEST_NAME = "manifest.tsv"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # POSIX-style, relative to the workspace root
    sha256: str
    stage: str
    params: str


class Workspace:
    def __init__(self, root: Path):
        self.root = Path(root)

    # -- layout ----------------------------------------------------------
    def episode_dir(self, episode_id: str) -> Path:
        return self.root / "episodes" / episode_id

    def source_dir(self, episode_id: str) -> Path:
        return self.episode_dir(episode_id) / "source"

    def words_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "words.tsv"

    def scenes_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "scenes.tsv"

    def cast_roles_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "cast_roles.tsv"

    def source_shots_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "shots.tsv"

    def histograms_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "histograms.tsv"

    def features_path(self, ep: str) -> Path:
        return self.source_dir(ep) / "features.memfeat"

    def annotation_path(self, ep: str) -> Path:
        return self.episode_dir(ep) / "annotation.tsv"

    def shots_path(self, ep: str) -> Path:
        return self.episode_dir(ep) / "shots.tsv"

    def scores_path(self, ep: str) -> Path:
        return self.episode_dir(ep) / "scores.tsv"

    def signal_path(self, ep: str) -> Path:
        return self.episode_dir(ep) / "signal.tsv"

    def contexts_path(self, ep: str) -> Path:
        return self.episode_dir(ep) / "contexts.tsv"

    def episode_reports_dir(self, ep: str) -> Path:
        return self.episode_dir(ep) / "reports"

    @property
    def training_scores_path(self) -> Path:
        return self.root / "training" / "scores.tsv"

    @property
    def training_features_dir(self) -> Path:
        return self.root / "training" / "features"

    @property
    def model_path(self) -> Path:
        return self.root / "model" / "brr.model"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def episodes(self) -> list[str]:
        base = self.root / "episodes"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if p.is_dir())

    # -- guards ----------------------------------------------------------
    def require_inputs(self, stage: str, paths: Iterable[Path]) -> None:
        missing = [str(p) for p in paths if not Path(p).is_file()]
        if missing:
            raise StageInputError(
                f"stage {stage}: missing input file(s): {', '.join(missing)}"
            )

    def guard_outputs(self, paths: Iterable[Path], force: bool) -> None:
        existing = [str(p) for p in paths if Path(p).exists()]
        if existing and not force:
            raise OutputExistsError(
                f"refusing to overwrite existing artifact(s) without --force: "
                f"{', '.join(existing)}"
            )

    # -- manifest ----------------------------------------------------------
    def relpath(self, path: Path) -> str:
        return Path(path).resolve().relative_to(self.root.resolve()).as_posix()

    def read_manifest(self) -> list[ManifestEntry]:
        if not self.manifest_path.is_file():
            return []
        entries = []
        for line in self.manifest_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            path, sha, stage, params = line.split("\t", 3)
            entries.append(ManifestEntry(path, sha, stage, params))
        return entries

    def record(
        self,
        stage: str,
        outputs: Iterable[Path],
        inputs: Iterable[Path] = (),
        params: Mapping[str, object] | None = None,
    ) -> list[ManifestEntry]:
        """Hash outputs and rewrite their manifest lines."""
        input_part = ",".join(
            f"{self.relpath(p)}@{sha256_file(p)[:12]}" for p in inputs
        )
        param_part = ";".join(f"{k}={v}" for k, v in sorted((params or {}).items()))
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        fields = [p for p in (param_part, f"inputs={input_part}" if input_part else "", f"at={stamp}") if p]
        entries = {e.path: e for e in self.read_manifest()}
        new_entries = []
        for out in outputs:
            entry = ManifestEntry(
                path=self.relpath(out),
                sha256=sha256_file(out),
                stage=stage,
                params=";".join(fields),
            )
            entries[entry.path] = entry
            new_entries.append(entry)
        lines = [
            "\t".join((e.path, e.sha256, e.stage, e.params))
            for e in sorted(entries.values(), key=lambda e: e.path)
        ]
        self.manifest_path.parent.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n"
        )
        return new_entries

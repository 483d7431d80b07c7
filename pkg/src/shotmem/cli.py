"""Command-line front end for the memorability pipeline.

One subcommand per stage (etl, shots, train, score, smooth, align,
analyze, report) plus ``run-all``, ``synth`` (synthetic demo workspace)
and ``validate`` (check interchange files produced by external tools).

Options may come from an INI config file (section ``[shotmem]``, keys
named like the long flags) with explicit flags taking precedence.

Exit codes: 0 ok, 2 missing/unreadable input, 3 schema or validation
failure.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from pathlib import Path

from . import features, shots, synthetic
from .errors import OutputExistsError, ShotmemError, StageInputError
from .pipeline import STAGES, PipelineConfig, run_pipeline, run_stage

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3

logger = logging.getLogger("shotmem")


def _parse_sweep(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:STEP, got {text!r}")
    try:
        n_min, n_max, step = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-integer in sweep {text!r}") from None
    return n_min, n_max, step


def _parse_windows(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window list {text!r}") from None


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="INI config file ([shotmem] section)")
    parser.add_argument("--workspace", type=Path, default=None,
                        help="workspace root directory")
    parser.add_argument("--episode", default=None,
                        help="restrict to one episode id (default: all present)")
    parser.add_argument("--window", type=_parse_windows, default=None, metavar="N[,N...]",
                        help="smoothing windows drawn in report plots")
    parser.add_argument("--sweep", type=_parse_sweep, default=None, metavar="MIN:MAX:STEP",
                        help="smoothing window sweep (default 15:305:10)")
    parser.add_argument("--k-frames", type=int, default=None,
                        help="representative frames per shot (default 3)")
    parser.add_argument("--fps", type=float, default=None,
                        help="frame sampling rate in frames per second (default 3)")
    parser.add_argument("--threshold", type=float, default=None,
                        help="fallback shot detector L1 threshold (default 0.5)")
    parser.add_argument("--min-shot-ms", type=int, default=None,
                        help="fallback detector minimum shot length (default 400)")
    parser.add_argument("--top-k-cast", type=int, default=None,
                        help="main cast size by speaking time (default 6)")
    parser.add_argument("--force", action="store_true", default=None,
                        help="overwrite existing artifacts")


_CONFIG_KEYS = {
    "workspace": Path,
    "episode": str,
    "window": _parse_windows,
    "sweep": _parse_sweep,
    "k_frames": int,
    "fps": float,
    "threshold": float,
    "min_shot_ms": int,
    "top_k_cast": int,
    "force": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
}


def _load_config_file(path: Path) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise StageInputError(f"config file not found: {path}")
    if not parser.has_section("shotmem"):
        raise ShotmemError(f"{path}: missing [shotmem] section")
    out = {}
    for key, raw in parser.items("shotmem"):
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ShotmemError(f"{path}: unknown config key {key!r}")
        out[key] = _CONFIG_KEYS[key](raw)
    return out


def build_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    settings: dict = {}
    if args.config is not None:
        settings.update(_load_config_file(args.config))
    overrides = {
        "workspace": args.workspace,
        "episode": args.episode,
        "windows": args.window,
        "sweep": args.sweep,
        "k_frames": args.k_frames,
        "fps": args.fps,
        "threshold": args.threshold,
        "min_shot_ms": args.min_shot_ms,
        "top_k_cast": args.top_k_cast,
        "force": args.force,
    }
    if "window" in settings:
        settings["windows"] = settings.pop("window")
    settings.update({k: v for k, v in overrides.items() if v is not None})
    if settings.get("workspace") is None:
        raise StageInputError("no workspace given (use --workspace or a config file)")
    defaults = PipelineConfig(workspace=Path(settings["workspace"]))
    return PipelineConfig(
        workspace=Path(settings["workspace"]),
        episode=settings.get("episode", defaults.episode),
        windows=tuple(settings.get("windows", defaults.windows)),
        sweep=tuple(settings.get("sweep", defaults.sweep)),
        k_frames=settings.get("k_frames", defaults.k_frames),
        fps=settings.get("fps", defaults.fps),
        threshold=settings.get("threshold", defaults.threshold),
        min_shot_ms=settings.get("min_shot_ms", defaults.min_shot_ms),
        top_k_cast=settings.get("top_k_cast", defaults.top_k_cast),
        force=bool(settings.get("force", defaults.force)),
    )


def _cmd_stage(stage: str, args: argparse.Namespace) -> int:
    config = build_pipeline_config(args)
    written = run_stage(stage, config)
    for path in written:
        print(f"{stage}: wrote {path}")
    return EXIT_OK


def _cmd_run_all(args: argparse.Namespace) -> int:
    config = build_pipeline_config(args)
    written = run_pipeline(config)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    truth = synthetic.generate_workspace(args.workspace, seed=args.seed)
    print(f"synthetic workspace at {args.workspace}")
    print(f"episode: {truth.episode_id}, cast order: {', '.join(truth.cast_order)}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    if args.kind == "features":
        table = features.read_feature_table(args.file)
        print(f"ok: {args.file}: dim={table.dim}, {len(table.frames)} frames")
    else:
        shot_list = shots.read_shot_list(args.file, strict=True)
        episodes = sorted({s.episode_id for s in shot_list})
        print(f"ok: {args.file}: {len(shot_list)} shots, episodes: {', '.join(episodes)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotmem",
        description="Per-shot video memorability scoring and screenplay alignment.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in STAGES:
        stage_parser = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_common_options(stage_parser)
        stage_parser.set_defaults(func=lambda a, s=stage: _cmd_stage(s, a))

    run_all = sub.add_parser("run-all", help="run every stage in order")
    _add_common_options(run_all)
    run_all.set_defaults(func=_cmd_run_all)

    synth = sub.add_parser("synth", help="generate a synthetic demo workspace")
    synth.add_argument("--workspace", type=Path, required=True)
    synth.add_argument("--seed", type=int, default=2024)
    synth.set_defaults(func=_cmd_synth)

    validate = sub.add_parser("validate", help="validate an interchange file")
    validate.add_argument("kind", choices=("features", "shots"))
    validate.add_argument("file", type=Path)
    validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OutputExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ShotmemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

"""Series-level statistics over shot memorability scores.

Shots contribute their score to every main-cast character speaking in
them and to every aspect they carry, grouped per season and over all
seasons combined. Distribution summaries use letter values (fourths,
eighths, sixteenths) so boxen-style plots can be drawn without keeping
the raw scores around.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .align import ShotContext
from .corpus import Aspect
from .errors import ValidationError
from .regression import ShotScore

ALL_SEASONS = "all"

_EPISODE_ID_RE = re.compile(r"^s(\d+)e(\d+)$", re.IGNORECASE)


def season_of(episode_id: str) -> int | None:
    """Season number from ids like ``"s01e08"``; None when unparsable."""
    m = _EPISODE_ID_RE.match(episode_id.strip())
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class ShotRecord:
    """One scored shot with its attribution sets, ready for grouping."""

    episode_id: str
    season: int | None
    shot_index: int
    score: float
    speakers: frozenset[str]
    aspects: frozenset[Aspect]


def shot_records(
    episode_id: str,
    contexts: Sequence[ShotContext],
    scores: Sequence[ShotScore],
) -> list[ShotRecord]:
    """Join contexts with scores on shot_index."""
    by_index = {s.shot_index: s for s in scores}
    season = season_of(episode_id)
    records = []
    for ctx in contexts:
        if ctx.shot_index not in by_index:
            raise ValidationError(
                f"{episode_id}: no score for shot {ctx.shot_index}"
            )
        records.append(
            ShotRecord(
                episode_id=episode_id,
                season=season,
                shot_index=ctx.shot_index,
                score=by_index[ctx.shot_index].score,
                speakers=ctx.speakers,
                aspects=ctx.aspects,
            )
        )
    return records


@dataclass(frozen=True)
class DistributionSummary:
    key: str
    season: str  # season number as text, or "all"
    n: int
    mean: float | None
    median: float | None
    q1: float | None
    q3: float | None
    eighth_lo: float | None
    eighth_hi: float | None
    sixteenth_lo: float | None
    sixteenth_hi: float | None


def _value_at_depth(ordered: np.ndarray, depth: float, from_top: bool) -> float:
    # Depth counts 1-based from the nearer end; halves average neighbors.
    n = ordered.shape[0]
    if from_top:
        depth = n + 1 - depth
    lo = int(np.floor(depth))
    hi = int(np.ceil(depth))
    if lo == hi:
        return float(ordered[lo - 1])
    return float((ordered[lo - 1] + ordered[hi - 1]) / 2.0)


def letter_values(scores: Sequence[float]) -> dict[str, float]:
    """Median, fourths, eighths and sixteenths by the letter-value depth rule.

    Depths follow d_median = (n + 1) / 2 and d_next = (floor(d) + 1) / 2;
    a half depth averages the two adjacent order statistics.
    """
    ordered = np.sort(np.asarray(scores, dtype=np.float64))
    n = ordered.shape[0]
    if n == 0:
        raise ValidationError("letter values of an empty sample")
    d_median = (n + 1) / 2.0
    d_fourth = (np.floor(d_median) + 1) / 2.0
    d_eighth = (np.floor(d_fourth) + 1) / 2.0
    d_sixteenth = (np.floor(d_eighth) + 1) / 2.0
    return {
        "median": _value_at_depth(ordered, d_median, from_top=False),
        "q1": _value_at_depth(ordered, d_fourth, from_top=False),
        "q3": _value_at_depth(ordered, d_fourth, from_top=True),
        "eighth_lo": _value_at_depth(ordered, d_eighth, from_top=False),
        "eighth_hi": _value_at_depth(ordered, d_eighth, from_top=True),
        "sixteenth_lo": _value_at_depth(ordered, d_sixteenth, from_top=False),
        "sixteenth_hi": _value_at_depth(ordered, d_sixteenth, from_top=True),
    }


def summarize(key: str, season: str, scores: Sequence[float]) -> DistributionSummary:
    if len(scores) == 0:
        return DistributionSummary(
            key=key, season=season, n=0, mean=None, median=None, q1=None, q3=None,
            eighth_lo=None, eighth_hi=None, sixteenth_lo=None, sixteenth_hi=None,
        )
    # Summing in sorted order makes the mean exactly permutation invariant.
    ordered = np.sort(np.asarray(scores, dtype=np.float64))
    lv = letter_values(ordered)
    return DistributionSummary(
        key=key,
        season=season,
        n=len(scores),
        mean=float(ordered.mean()),
        **lv,
    )


def _season_labels(records: Sequence[ShotRecord], seasons: Iterable[int] | None) -> list[int]:
    if seasons is not None:
        return sorted(set(seasons))
    return sorted({r.season for r in records if r.season is not None})


def _group_summaries(
    records: Sequence[ShotRecord],
    keys: Sequence[str],
    members: Mapping[str, set[int]],  # key -> indices of contributing records
    seasons: Iterable[int] | None,
) -> list[DistributionSummary]:
    labels = _season_labels(records, seasons)
    wanted = set(labels)
    out: list[DistributionSummary] = []
    for key in keys:
        rows = [records[i] for i in sorted(members.get(key, set()))]
        for season in labels:
            scores = [r.score for r in rows if r.season == season]
            out.append(summarize(key, str(season), scores))
        all_scores = [r.score for r in rows if seasons is None or r.season in wanted]
        out.append(summarize(key, ALL_SEASONS, all_scores))
    return out


def memorability_by_character(
    records: Sequence[ShotRecord],
    cast: Sequence[str],
    seasons: Iterable[int] | None = None,
) -> list[DistributionSummary]:
    """One summary per (main-cast character, season) and per (character, all).

    A shot's score contributes to every main-cast character speaking in it.
    """
    cast_set = set(cast)
    members: dict[str, set[int]] = {name: set() for name in cast}
    for i, record in enumerate(records):
        for name in record.speakers & cast_set:
            members[name].add(i)
    return _group_summaries(records, list(cast), members, seasons)


def memorability_by_aspect(
    records: Sequence[ShotRecord],
    seasons: Iterable[int] | None = None,
) -> list[DistributionSummary]:
    """One summary per (aspect, season) and per (aspect, all)."""
    keys = [a.value for a in Aspect]
    members: dict[str, set[int]] = {k: set() for k in keys}
    for i, record in enumerate(records):
        for aspect in record.aspects:
            members[aspect.value].add(i)
    return _group_summaries(records, keys, members, seasons)


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks on ties."""
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValidationError("Spearman correlation needs at least 2 pairs")
    rx = rankdata(x)
    ry = rankdata(y)
    if np.std(rx) == 0.0 or np.std(ry) == 0.0:
        return float("nan")
    return float(np.corrcoef(rx, ry)[0, 1])


def rank_correlation(order_a: Sequence, order_b: Sequence) -> float:
    """Spearman rho between two orderings of the same element set."""
    if set(order_a) != set(order_b):
        only_a = set(order_a) - set(order_b)
        only_b = set(order_b) - set(order_a)
        raise ValidationError(
            f"orderings cover different elements (only in a: {sorted(map(str, only_a))[:5]}, "
            f"only in b: {sorted(map(str, only_b))[:5]})"
        )
    if len(set(order_a)) != len(order_a) or len(set(order_b)) != len(order_b):
        raise ValidationError("orderings contain duplicate elements")
    pos_b = {element: i for i, element in enumerate(order_b)}
    ranks_a = list(range(len(order_a)))
    ranks_b = [pos_b[element] for element in order_a]
    return spearman_rho([float(r) for r in ranks_a], [float(r) for r in ranks_b])


def screen_time_vs_memorability(
    summaries: Sequence[DistributionSummary],
    speaking_minutes: Mapping[str, float],
) -> tuple[list[tuple[str, float, float]], float]:
    """Pair each character's speaking minutes with their overall median score.

    Uses the season="all" summaries with n > 0. Returns rows sorted by
    minutes descending plus the Spearman rho of the pairing.
    """
    medians = {
        s.key: s.median
        for s in summaries
        if s.season == ALL_SEASONS and s.n > 0 and s.median is not None
    }
    shared = sorted(set(medians) & set(speaking_minutes))
    if len(shared) < 2:
        raise ValidationError(
            f"need at least 2 shared characters, got {len(shared)}"
        )
    rows = [(name, float(speaking_minutes[name]), float(medians[name])) for name in shared]
    rows.sort(key=lambda r: (-r[1], r[0]))
    rho = spearman_rho([r[1] for r in rows], [r[2] for r in rows])
    return rows, rho


SUMMARY_COLUMNS = (
    "key",
    "season",
    "n",
    "mean",
    "median",
    "q1",
    "q3",
    "eighth_lo",
    "eighth_hi",
    "sixteenth_lo",
    "sixteenth_hi",
)


def _format_stat(value: float | None) -> str:
    return "NA" if value is None else f"{value:.6g}"


def write_summaries(summaries: Iterable[DistributionSummary], path: Path) -> None:
    lines = ["\t".join(SUMMARY_COLUMNS)]
    for s in summaries:
        lines.append(
            "\t".join(
                (
                    s.key,
                    s.season,
                    str(s.n),
                    _format_stat(s.mean),
                    _format_stat(s.median),
                    _format_stat(s.q1),
                    _format_stat(s.q3),
                    _format_stat(s.eighth_lo),
                    _format_stat(s.eighth_hi),
                    _format_stat(s.sixteenth_lo),
                    _format_stat(s.sixteenth_hi),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_summaries(path: Path) -> list[DistributionSummary]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != list(SUMMARY_COLUMNS):
        raise ValidationError(f"{path}: bad or missing summary header")
    out: list[DistributionSummary] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        stats = [None if f == "NA" else float(f) for f in fields[3:]]
        out.append(
            DistributionSummary(
                key=fields[0],
                season=fields[1],
                n=int(fields[2]),
                mean=stats[0],
                median=stats[1],
                q1=stats[2],
                q3=stats[3],
                eighth_lo=stats[4],
                eighth_hi=stats[5],
                sixteenth_lo=stats[6],
                sixteenth_hi=stats[7],
            )
        )
    return out

"""Screenplay-corpus ETL: parse, aggregate, merge and augment annotations.

Two source corpora describe each episode. The word-level table carries
one row per spoken (or stage-direction) word with case/sentence ids,
speaker, sentence timing and the killer/suspect/other "gold" mention
flags. The scene-level table carries one row per scene with its
screenplay text and significance aspects. This module lifts both to a
common sentence-level representation, merges them positionally, and
applies the role-based aspect augmentation (scenes in which the
perpetrator or a suspect speaks gain the matching aspect).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, SchemaError, ValidationError
from .timecode import parse_timestamp

logger = logging.getLogger(__name__)

WORD_CORPUS_COLUMNS = (
    "caseID",
    "sentID",
    "speaker",
    "word",
    "start",
    "end",
    "killer_gold",
    "suspect_gold",
    "other_gold",
)
SCENE_CORPUS_COLUMNS = ("sceneID", "screenplay", "aspect")
ANNOTATION_COLUMNS = (
    "caseID",
    "sentID",
    "speaker",
    "type_mentioned",
    "start_ms",
    "end_ms",
    "sentence",
    "aspects",
    "scene_id",
)

# Separator between sentence texts inside a scene record's screenplay field.
SCREENPLAY_SEP = " | "


class Aspect(enum.Enum):
    """Scene-significance label. ``SUSPECT`` only appears via augmentation."""

    CRIME_SCENE = "CrimeScene"
    VICTIM = "Victim"
    DEATH_CAUSE = "DeathCause"
    EVIDENCE = "Evidence"
    PERPETRATOR = "Perpetrator"
    MOTIVE = "Motive"
    SUSPECT = "Suspect"
    NONE = "None"


# Deterministic order for serializing aspect sets.
ASPECT_ORDER = {aspect: i for i, aspect in enumerate(Aspect)}

_ASPECT_LOOKUP = {a.value.lower(): a for a in Aspect}
_ASPECT_LOOKUP.update({"crime scene": Aspect.CRIME_SCENE, "death cause": Aspect.DEATH_CAUSE})


class TypeMentioned(enum.Enum):
    KILLER = "killer"
    SUSPECT = "suspect"
    OTHER = "other"
    NONE = "none"


class CastRole(enum.Enum):
    PERPETRATOR = "perpetrator"
    SUSPECT = "suspect"
    OTHER = "other"


@dataclass(frozen=True)
class WordToken:
    case_id: int
    sent_id: int
    speaker: str | None
    start_ms: int
    end_ms: int
    word: str
    killer_gold: bool
    suspect_gold: bool
    other_gold: bool


@dataclass(frozen=True)
class Sentence:
    case_id: int
    sent_id: int
    speaker: str | None
    type_mentioned: TypeMentioned
    start_ms: int
    end_ms: int
    text: str
    aspects: frozenset[Aspect] = frozenset()

    @property
    def key(self) -> tuple[int, int]:
        return (self.case_id, self.sent_id)

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class Scene:
    scene_id: int
    screenplay: tuple[str, ...]
    aspects: frozenset[Aspect]


@dataclass(frozen=True)
class SceneMembership:
    """Sentence-level scene row produced by :func:`disaggregate_scenes`.

    ``position`` is the 0-based chronological index of the sentence in
    the episode; it is the join key used by :func:`merge_corpora`.
    """

    position: int
    scene_id: int
    aspects: frozenset[Aspect]
    expected_text: str


@dataclass
class EpisodeAnnotation:
    episode_id: str
    sentences: list[Sentence]
    scene_index: dict[tuple[int, int], int]
    cast_roles: dict[str, CastRole] = field(default_factory=dict)

    def __post_init__(self):
        starts = [s.start_ms for s in self.sentences]
        if any(b < a for a, b in zip(starts, starts[1:])):
            raise ValidationError(
                f"episode {self.episode_id}: sentences are not in chronological order"
            )
        keys = [s.key for s in self.sentences]
        if len(set(keys)) != len(keys):
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            raise ValidationError(
                f"episode {self.episode_id}: duplicate (caseID, sentID) keys: {dupes[:5]}"
            )
        missing = [k for k in keys if k not in self.scene_index]
        if missing:
            raise ValidationError(
                f"episode {self.episode_id}: sentences without a scene: {missing[:5]}"
            )

    def scene_ids(self) -> list[int]:
        """Distinct scene ids in first-appearance (chronological) order."""
        seen: dict[int, None] = {}
        for s in self.sentences:
            seen.setdefault(self.scene_index[s.key], None)
        return list(seen)

    def scene_sentences(self, scene_id: int) -> list[Sentence]:
        return [s for s in self.sentences if self.scene_index[s.key] == scene_id]

    def scene_aspects(self, scene_id: int) -> frozenset[Aspect]:
        out: set[Aspect] = set()
        for s in self.scene_sentences(scene_id):
            out |= s.aspects
        return frozenset(out)


def parse_aspect(text: str) -> Aspect:
    key = text.strip().replace("_", " ").lower()
    key = " ".join(key.split())
    aspect = _ASPECT_LOOKUP.get(key) or _ASPECT_LOOKUP.get(key.replace(" ", ""))
    if aspect is None:
        raise ParseError(f"unknown aspect {text!r}")
    return aspect


def parse_aspect_set(text: str) -> frozenset[Aspect]:
    """Split a multi-valued aspect field (``"Victim;Evidence"``) into a set."""
    parts = [p for p in (piece.strip() for piece in text.split(";")) if p]
    if not parts:
        return frozenset({Aspect.NONE})
    return frozenset(parse_aspect(p) for p in parts)


def _check_none_exclusive(aspects: frozenset[Aspect], where: str) -> None:
    # "None" marks the absence of significance; it cannot coexist with a
    # real aspect on a single scene or sentence.
    if Aspect.NONE in aspects and len(aspects) > 1:
        raise ParseError(f"{where}: aspect None combined with {format_aspect_set(aspects - {Aspect.NONE})}")


def format_aspect_set(aspects: Iterable[Aspect]) -> str:
    ordered = sorted(set(aspects), key=ASPECT_ORDER.__getitem__)
    return ";".join(a.value for a in ordered)


def _speaker_from_field(text: str) -> str | None:
    text = text.strip()
    return None if text in ("", "None") else text


def _speaker_to_field(speaker: str | None) -> str:
    return "None" if speaker is None else speaker


def _split_header(line: str, expected: Sequence[str], path=None) -> None:
    cols = line.rstrip("\n").split("\t")
    missing = [c for c in expected if c not in cols]
    if missing or list(cols) != list(expected):
        raise SchemaError(
            f"{path or 'corpus'}: bad header: expected columns {list(expected)}, got {cols}"
        )


def _parse_bool(text: str, column: str, line_no: int, path=None) -> bool:
    if text in ("0", "1"):
        return text == "1"
    raise ParseError(
        f"bad boolean {text!r} in column {column}", path=path, line=line_no, column=column
    )


def _parse_int(text: str, column: str, line_no: int, path=None) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(
            f"bad integer {text!r} in column {column}", path=path, line=line_no, column=column
        ) from None


def parse_word_corpus(text: str, path=None) -> list[WordToken]:
    """Parse the tab-separated word-level corpus into tokens, in file order."""
    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{path or 'word corpus'}: empty file (header row required)")
    _split_header(lines[0], WORD_CORPUS_COLUMNS, path=path)
    tokens: list[WordToken] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(WORD_CORPUS_COLUMNS):
            raise ParseError(
                f"expected {len(WORD_CORPUS_COLUMNS)} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        row = dict(zip(WORD_CORPUS_COLUMNS, fields))
        try:
            start_ms = parse_timestamp(row["start"])
        except ParseError as exc:
            raise ParseError(str(exc), path=path, line=line_no, column="start") from None
        try:
            end_ms = parse_timestamp(row["end"])
        except ParseError as exc:
            raise ParseError(str(exc), path=path, line=line_no, column="end") from None
        if start_ms > end_ms:
            raise ParseError(
                f"start {row['start']} after end {row['end']}", path=path, line=line_no
            )
        word = row["word"]
        if not word:
            raise ParseError("empty word field", path=path, line=line_no, column="word")
        tokens.append(
            WordToken(
                case_id=_parse_int(row["caseID"], "caseID", line_no, path),
                sent_id=_parse_int(row["sentID"], "sentID", line_no, path),
                speaker=_speaker_from_field(row["speaker"]),
                start_ms=start_ms,
                end_ms=end_ms,
                word=word,
                killer_gold=_parse_bool(row["killer_gold"], "killer_gold", line_no, path),
                suspect_gold=_parse_bool(row["suspect_gold"], "suspect_gold", line_no, path),
                other_gold=_parse_bool(row["other_gold"], "other_gold", line_no, path),
            )
        )
    return tokens


def _type_mentioned(tokens: Sequence[WordToken]) -> TypeMentioned:
    # Priority killer > suspect > other > none over the group's gold flags.
    if any(t.killer_gold for t in tokens):
        return TypeMentioned.KILLER
    if any(t.suspect_gold for t in tokens):
        return TypeMentioned.SUSPECT
    if any(t.other_gold for t in tokens):
        return TypeMentioned.OTHER
    return TypeMentioned.NONE


def aggregate_to_sentences(tokens: Iterable[WordToken]) -> list[Sentence]:
    """Collapse word tokens into one sentence per (case_id, sent_id) group.

    Words are joined by single spaces in token order; timing is the
    min/max over the group; the mention type follows the killer >
    suspect > other > none priority.
    """
    groups: dict[tuple[int, int], list[WordToken]] = {}
    for token in tokens:
        groups.setdefault((token.case_id, token.sent_id), []).append(token)
    sentences: list[Sentence] = []
    for (case_id, sent_id), group in groups.items():
        speakers = {t.speaker for t in group}
        if len(speakers) > 1:
            raise ValidationError(
                f"sentence ({case_id}, {sent_id}) has conflicting speakers: "
                f"{sorted(s or 'None' for s in speakers)}"
            )
        sentences.append(
            Sentence(
                case_id=case_id,
                sent_id=sent_id,
                speaker=group[0].speaker,
                type_mentioned=_type_mentioned(group),
                start_ms=min(t.start_ms for t in group),
                end_ms=max(t.end_ms for t in group),
                text=" ".join(t.word for t in group),
            )
        )
    return sentences


def parse_scene_corpus(text: str, path=None) -> list[Scene]:
    """Parse the tab-separated scene-level corpus, sorted by scene id."""
    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{path or 'scene corpus'}: empty file (header row required)")
    _split_header(lines[0], SCENE_CORPUS_COLUMNS, path=path)
    scenes: list[Scene] = []
    seen_ids: set[int] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(SCENE_CORPUS_COLUMNS):
            raise ParseError(
                f"expected {len(SCENE_CORPUS_COLUMNS)} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        scene_id = _parse_int(fields[0], "sceneID", line_no, path)
        if scene_id in seen_ids:
            raise ParseError(f"duplicate sceneID {scene_id}", path=path, line=line_no)
        seen_ids.add(scene_id)
        screenplay = tuple(s for s in (p.strip() for p in fields[1].split(SCREENPLAY_SEP)) if s)
        try:
            aspects = parse_aspect_set(fields[2])
            _check_none_exclusive(aspects, f"scene {scene_id}")
        except ParseError as exc:
            raise ParseError(str(exc), path=path, line=line_no, column="aspect") from None
        if Aspect.SUSPECT in aspects:
            # Suspect is introduced only by role-based augmentation, never
            # present in the source corpus.
            raise ParseError(
                f"scene {scene_id}: aspect Suspect is not a source-corpus value",
                path=path,
                line=line_no,
                column="aspect",
            )
        scenes.append(Scene(scene_id=scene_id, screenplay=screenplay, aspects=aspects))
    scenes.sort(key=lambda s: s.scene_id)
    return scenes


def disaggregate_scenes(scenes: Iterable[Scene]) -> list[SceneMembership]:
    """Expand scenes to one membership row per screenplay sentence.

    Rows are positional: scene k's sentences occupy the next
    ``len(screenplay)`` chronological slots of the episode.
    """
    rows: list[SceneMembership] = []
    position = 0
    for scene in sorted(scenes, key=lambda s: s.scene_id):
        for sentence_text in scene.screenplay:
            rows.append(
                SceneMembership(
                    position=position,
                    scene_id=scene.scene_id,
                    aspects=scene.aspects,
                    expected_text=sentence_text,
                )
            )
            position += 1
    return rows


def _normalize_text(text: str) -> str:
    return " ".join(text.split()).casefold()


def merge_corpora(
    sentences: Sequence[Sentence],
    membership: Iterable[SceneMembership],
    episode_id: str,
    cast_roles: Mapping[str, CastRole] | None = None,
) -> EpisodeAnnotation:
    """Join sentence-level rows with scene membership by episode position.

    Both sides must cover the episode exactly; the scene side's text is
    compared against the sentence text as a validation check only
    (matching itself is positional).
    """
    rows = sorted(membership, key=lambda r: r.position)
    if len(rows) != len(sentences):
        if len(rows) < len(sentences):
            uncovered = sentences[len(rows)].key
            raise ValidationError(
                f"episode {episode_id}: sentence {uncovered} not covered by any scene "
                f"({len(sentences)} sentences vs {len(rows)} scene rows)"
            )
        raise ValidationError(
            f"episode {episode_id}: cardinality mismatch: {len(sentences)} sentences "
            f"vs {len(rows)} scene rows"
        )
    merged: list[Sentence] = []
    scene_index: dict[tuple[int, int], int] = {}
    for sentence, row in zip(sentences, rows):
        if row.expected_text and _normalize_text(row.expected_text) != _normalize_text(
            sentence.text
        ):
            raise ValidationError(
                f"episode {episode_id}: scene {row.scene_id} text mismatch at position "
                f"{row.position}: corpus says {sentence.text!r}, scene says "
                f"{row.expected_text!r}"
            )
        merged.append(replace(sentence, aspects=row.aspects))
        scene_index[sentence.key] = row.scene_id
    return EpisodeAnnotation(
        episode_id=episode_id,
        sentences=merged,
        scene_index=scene_index,
        cast_roles=dict(cast_roles or {}),
    )


def augment_aspects(ann: EpisodeAnnotation) -> EpisodeAnnotation:
    """Extend scene aspects where the perpetrator or a suspect speaks.

    Every sentence of a scene in which a perpetrator-role character
    speaks gains ``Perpetrator``; likewise suspect-role speakers add
    ``Suspect``. No aspect is ever removed, except that ``None`` drops
    out when a real aspect is added. Idempotent by construction.
    """
    if not ann.cast_roles:
        logger.warning(
            "episode %s: no cast_roles supplied; aspect augmentation is a no-op",
            ann.episode_id,
        )
        return ann
    additions: dict[int, set[Aspect]] = {}
    for scene_id in ann.scene_ids():
        added: set[Aspect] = set()
        for sentence in ann.scene_sentences(scene_id):
            role = ann.cast_roles.get(sentence.speaker) if sentence.speaker else None
            if role is CastRole.PERPETRATOR:
                added.add(Aspect.PERPETRATOR)
            elif role is CastRole.SUSPECT:
                added.add(Aspect.SUSPECT)
        if added:
            additions[scene_id] = added
    sentences: list[Sentence] = []
    for sentence in ann.sentences:
        added = additions.get(ann.scene_index[sentence.key])
        if added:
            aspects = (set(sentence.aspects) | added) - {Aspect.NONE}
            sentence = replace(sentence, aspects=frozenset(aspects))
        sentences.append(sentence)
    return EpisodeAnnotation(
        episode_id=ann.episode_id,
        sentences=sentences,
        scene_index=dict(ann.scene_index),
        cast_roles=dict(ann.cast_roles),
    )


def parse_cast_roles(text: str, path=None) -> dict[str, CastRole]:
    """Parse the ``<character>\\t<role>`` side file."""
    roles: dict[str, CastRole] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"expected '<character>\\t<role>', got {line!r}", path=path, line=line_no
            )
        name, role_text = fields[0].strip(), fields[1].strip().lower()
        try:
            roles[name] = CastRole(role_text)
        except ValueError:
            raise ParseError(
                f"unknown role {role_text!r} (expected perpetrator/suspect/other)",
                path=path,
                line=line_no,
            ) from None
    return roles


def write_annotation(ann: EpisodeAnnotation, path: Path) -> None:
    """Write the merged annotation table (tab-separated, UTF-8, LF)."""
    lines = ["\t".join(ANNOTATION_COLUMNS)]
    for s in ann.sentences:
        for name, value in (("speaker", s.speaker or ""), ("sentence", s.text)):
            if "\t" in value or "\n" in value:
                raise ValidationError(
                    f"episode {ann.episode_id}: {name} field contains a tab or newline: "
                    f"{value!r}"
                )
        lines.append(
            "\t".join(
                (
                    str(s.case_id),
                    str(s.sent_id),
                    _speaker_to_field(s.speaker),
                    s.type_mentioned.value,
                    str(s.start_ms),
                    str(s.end_ms),
                    s.text,
                    format_aspect_set(s.aspects),
                    str(ann.scene_index[s.key]),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_annotation(path: Path, episode_id: str | None = None) -> EpisodeAnnotation:
    """Read a merged annotation table back into an :class:`EpisodeAnnotation`."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty annotation file")
    _split_header(lines[0], ANNOTATION_COLUMNS, path=path)
    sentences: list[Sentence] = []
    scene_index: dict[tuple[int, int], int] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(ANNOTATION_COLUMNS):
            raise ParseError(
                f"expected {len(ANNOTATION_COLUMNS)} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        row = dict(zip(ANNOTATION_COLUMNS, fields))
        try:
            type_mentioned = TypeMentioned(row["type_mentioned"])
        except ValueError:
            raise ParseError(
                f"unknown type_mentioned {row['type_mentioned']!r}", path=path, line=line_no
            ) from None
        try:
            _check_none_exclusive(parse_aspect_set(row["aspects"]), "sentence")
        except ParseError as exc:
            raise ParseError(str(exc), path=path, line=line_no, column="aspects") from None
        sentence = Sentence(
            case_id=_parse_int(row["caseID"], "caseID", line_no, path),
            sent_id=_parse_int(row["sentID"], "sentID", line_no, path),
            speaker=_speaker_from_field(row["speaker"]),
            type_mentioned=type_mentioned,
            start_ms=_parse_int(row["start_ms"], "start_ms", line_no, path),
            end_ms=_parse_int(row["end_ms"], "end_ms", line_no, path),
            text=row["sentence"],
            aspects=parse_aspect_set(row["aspects"]),
        )
        sentences.append(sentence)
        scene_index[sentence.key] = _parse_int(row["scene_id"], "scene_id", line_no, path)
    return EpisodeAnnotation(
        episode_id=episode_id or path.stem,
        sentences=sentences,
        scene_index=scene_index,
    )

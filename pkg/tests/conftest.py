from pathlib import Path

import pytest

from shotmem import corpus

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def table1_words() -> str:
    return (DATA_DIR / "table1_words.tsv").read_text(encoding="utf-8")


@pytest.fixture
def table1_scenes() -> str:
    return (DATA_DIR / "table1_scenes.tsv").read_text(encoding="utf-8")


@pytest.fixture
def table1_roles() -> dict:
    return corpus.parse_cast_roles(
        (DATA_DIR / "table1_cast_roles.tsv").read_text(encoding="utf-8")
    )


@pytest.fixture
def table1_annotation(table1_words, table1_scenes, table1_roles) -> corpus.EpisodeAnnotation:
    sentences = corpus.aggregate_to_sentences(corpus.parse_word_corpus(table1_words))
    membership = corpus.disaggregate_scenes(corpus.parse_scene_corpus(table1_scenes))
    ann = corpus.merge_corpora(
        sentences, membership, episode_id="s01e08", cast_roles=table1_roles
    )
    return corpus.augment_aspects(ann)

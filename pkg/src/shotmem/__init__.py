"""Per-shot video memorability scoring aligned to annotated screenplays.

The package turns precomputed frame features into chronological
memorability signals via a Bayesian ridge regressor, joins them with a
word/scene annotated screenplay corpus, and produces the character- and
aspect-level distribution reports plus SVG plots.
"""

from .align import ShotContext, align_shots, aspect_scene_counts, main_cast, speaking_time
from .analytics import (
    DistributionSummary,
    ShotRecord,
    memorability_by_aspect,
    memorability_by_character,
    rank_correlation,
    screen_time_vs_memorability,
    spearman_rho,
)
from .corpus import (
    Aspect,
    CastRole,
    EpisodeAnnotation,
    Scene,
    Sentence,
    TypeMentioned,
    WordToken,
    aggregate_to_sentences,
    augment_aspects,
    disaggregate_scenes,
    merge_corpora,
    parse_scene_corpus,
    parse_word_corpus,
)
from .errors import (
    DimensionMismatchError,
    OutputExistsError,
    ParseError,
    SchemaError,
    ShotmemError,
    StageInputError,
    ValidationError,
)
from .features import (
    FeatureTable,
    FrameFeature,
    read_feature_table,
    sample_times,
    select_representative,
    shot_frame_matrix,
    write_feature_table,
)
from .pipeline import PipelineConfig, run_pipeline, run_stage
from .regression import BRRModel, ShotScore, TrainingSet, fit, predict, score_shot
from .shots import (
    FrameHistogramSequence,
    Shot,
    detect_shots_histogram,
    parse_shot_list,
    validate_shot_list,
)
from .signals import MemSignal, SmoothingConfig, build_signal, smooth, sweep_windows
from .timecode import format_timestamp, parse_timestamp
from .workspace import Workspace

__version__ = "0.1.0"

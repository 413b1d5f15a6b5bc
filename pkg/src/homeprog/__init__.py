"""Household activity programs: DSL, symbolic simulator, metrics, generator."""

from .programs import (
    Action,
    ObjectMention,
    Program,
    Step,
    canonicalize_ids,
    format_program,
    parse_program,
    validate,
)
from .environment import Environment, load_environment, query_instances, snapshot, diff
from .scene_prep import PlacementKB, prepare_scene, sample_support
from .executor import (
    ExecutionTrace,
    GroundingMap,
    SearchLimits,
    apply_step,
    check_step,
    ground_and_execute,
    is_executable,
)
from .metrics import (
    RewardConfig,
    ScoreReport,
    diversity_stats,
    executability_rate,
    lcs_length,
    normalized_lcs,
    pairwise_similarity,
    score,
)
from .generator import GrammarConfig, describe, generate_dataset, generate_program
from .dataset import (
    DatasetRecord,
    DatasetStats,
    compute_stats,
    load_manifest,
    save_manifest,
    split_dataset,
)

__version__ = "0.1.0"

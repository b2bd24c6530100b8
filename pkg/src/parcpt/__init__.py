"""parcpt: penalised-cost changepoint detection with parallel schedulers.

Exact optimal partitioning (with PELT pruning) of a series into
constant-mean segments, restricted candidate sets, the chunk and deal
split/merge schedulers, and a seeded simulation/benchmark harness.
"""

from .core import (
    CandidateSet,
    DetectorConfig,
    InvalidConfigError,
    InvalidInputError,
    PenaltyRule,
    Segmentation,
    TimeSeries,
    default_overlap,
    resolve_penalty,
)
from .cost import PrefixSums, build_prefix, estimate_noise_scale, penalised_cost, segment_cost
from .dp import (
    DpState,
    brute_force_partition,
    dp_step,
    init_dp_state,
    optimal_partition,
    partition_by_steps,
    pelt_prune,
)
from .parallel import (
    MergeInput,
    SplitPlan,
    WorkerResult,
    chunk_split,
    deal_split,
    detect,
    run_merge_phase,
    run_split_phase,
)
from .simbench import (
    MetricReport,
    ScenarioSpec,
    bench,
    generate_series,
    relative_cost,
    score,
    seed_sequence,
    simulate,
    warm_up,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "DetectorConfig",
    "DpState",
    "InvalidConfigError",
    "InvalidInputError",
    "MergeInput",
    "MetricReport",
    "PenaltyRule",
    "PrefixSums",
    "ScenarioSpec",
    "Segmentation",
    "SplitPlan",
    "TimeSeries",
    "WorkerResult",
    "bench",
    "brute_force_partition",
    "build_prefix",
    "chunk_split",
    "deal_split",
    "default_overlap",
    "detect",
    "dp_step",
    "estimate_noise_scale",
    "generate_series",
    "init_dp_state",
    "optimal_partition",
    "partition_by_steps",
    "pelt_prune",
    "penalised_cost",
    "relative_cost",
    "resolve_penalty",
    "run_merge_phase",
    "run_split_phase",
    "score",
    "seed_sequence",
    "segment_cost",
    "simulate",
    "warm_up",
]

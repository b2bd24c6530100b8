"""Chunk and Deal split/merge schedulers over the partitioning engine.

Chunk hands each worker a contiguous data window (with overlap V around
interior boundaries) and lets it fit changes anywhere in its window. Deal
hands every worker the full data but only the candidate indices of one
residue class mod L. Both then re-solve over the union of the returned
changepoints. Workers run on a thread pool; results are gathered by worker
index, never by completion order, so repeated runs are identical regardless
of scheduling or the ``PARCPT_THREADS`` cap.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    DetectorConfig,
    InvalidConfigError,
    Segmentation,
    TimeSeries,
    as_series,
)
from .cost import build_prefix, estimate_noise_scale, penalised_cost, rescaled
from .dp import optimal_partition

__all__ = [
    "MergeInput",
    "SplitPlan",
    "WorkerResult",
    "WorkerTask",
    "chunk_split",
    "deal_quota",
    "deal_split",
    "detect",
    "run_merge_phase",
    "run_split_phase",
]

THREAD_CAP_ENV = "PARCPT_THREADS"


@dataclass(frozen=True, eq=False)
class WorkerTask:
    """One worker's assignment: a data window and its candidate indices.

    ``window_start``/``window_stop`` are global 1-indexed inclusive bounds of
    the data the worker sees; ``candidates`` are global indices within it.
    """

    worker: int
    window_start: int
    window_stop: int
    candidates: np.ndarray


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """Per-worker tasks covering the whole series.

    The data windows jointly cover {1, ..., n} and the candidate sets
    jointly cover {1, ..., n-1}.
    """

    kind: str
    n: int
    tasks: tuple[WorkerTask, ...]
    overlap: int = 0

    @property
    def workers(self) -> int:
        return len(self.tasks)


@dataclass(frozen=True, eq=False)
class WorkerResult:
    """A worker's fitted changepoints, in global coordinates."""

    worker: int
    window_start: int
    window_stop: int
    changepoints: np.ndarray
    penalised_cost: float


@dataclass(frozen=True, eq=False)
class MergeInput:
    """All worker results plus their deduplicated, sorted union."""

    worker_results: tuple[WorkerResult, ...]
    union: np.ndarray


def chunk_split(n: int, workers: int, overlap: int) -> SplitPlan:
    """Contiguous windows of ~n/L points, widened by V on interior boundaries.

    The last window runs to n so the windows cover all the data; candidate
    indices are clamped to n-1 (an index at a window's own right edge cannot
    be fitted there and is covered by the next window instead).
    """
    if workers < 1:
        raise InvalidConfigError("workers must be >= 1")
    if overlap < 0:
        raise InvalidConfigError("overlap must be >= 0")
    if workers == 1:
        task = WorkerTask(1, 1, n, np.arange(1, n, dtype=np.int64))
        return SplitPlan(kind="chunk", n=n, tasks=(task,), overlap=overlap)

    width = n // workers
    if width + overlap >= n:
        raise InvalidConfigError(
            f"chunk window floor(n/L)+V = {width + overlap} must be < n = {n}"
        )
    if width - overlap < 1:
        raise InvalidConfigError(
            f"overlap {overlap} leaves an empty or negative-start window (floor(n/L) = {width})"
        )
    if workers >= 3 and 2 * overlap >= width:
        raise InvalidConfigError(
            f"overlap regions intersect: need 2V < floor(n/L), got V = {overlap}, "
            f"floor(n/L) = {width}"
        )

    tasks = []
    for i in range(1, workers + 1):
        if i == 1:
            start, stop = 1, width + overlap
        elif i < workers:
            start, stop = (i - 1) * width - overlap, i * width + overlap
        else:
            start, stop = (workers - 1) * width - overlap, n
        cands = np.arange(start, min(stop, n - 1) + 1, dtype=np.int64)
        tasks.append(WorkerTask(i, start, stop, cands))
    return SplitPlan(kind="chunk", n=n, tasks=tuple(tasks), overlap=overlap)


def deal_quota(a: int, b: int, c: int) -> int:
    """Largest integer Q with Q*b + (a mod b) < c: how many full rounds of b
    fit before c when dealing from offset a."""
    return (c - a % b - 1) // b


def deal_split(n: int, workers: int) -> SplitPlan:
    """Candidate indices dealt round-robin: worker i gets {i, i+L, ...} below n.

    Every worker sees the full data.
    """
    if workers < 1:
        raise InvalidConfigError("workers must be >= 1")
    if workers > n - 1:
        raise InvalidConfigError(
            f"deal needs workers <= n-1 so every worker holds a candidate, got L = {workers}"
        )
    tasks = tuple(
        WorkerTask(i, 1, n, np.arange(i, n, workers, dtype=np.int64))
        for i in range(1, workers + 1)
    )
    return SplitPlan(kind="deal", n=n, tasks=tasks)


def _pool_width(n_tasks: int) -> int:
    cap = os.environ.get(THREAD_CAP_ENV)
    if cap is None:
        return n_tasks
    try:
        cap_value = int(cap)
    except ValueError as exc:
        raise InvalidConfigError(f"{THREAD_CAP_ENV} must be an integer, got {cap!r}") from exc
    if cap_value < 1:
        raise InvalidConfigError(f"{THREAD_CAP_ENV} must be >= 1, got {cap_value}")
    return min(n_tasks, cap_value)


def _run_task(y: TimeSeries, task: WorkerTask, beta: float, min_segment_length: int) -> WorkerResult:
    if task.window_start == 1 and task.window_stop == y.n:
        local_y = y
        offset = 0
        local_cands = task.candidates
    else:
        local_y = TimeSeries(y.values[task.window_start - 1 : task.window_stop])
        offset = task.window_start - 1
        local_cands = task.candidates - offset
        # A candidate at the window's right edge cannot close inside it.
        local_cands = local_cands[local_cands < local_y.n]
    seg = optimal_partition(
        local_y, local_cands, beta, prune=True, min_segment_length=min_segment_length
    )
    cps = np.asarray(seg.changepoints, dtype=np.int64) + offset
    return WorkerResult(
        worker=task.worker,
        window_start=task.window_start,
        window_stop=task.window_stop,
        changepoints=cps,
        penalised_cost=seg.penalised_cost,
    )


def run_split_phase(y, plan: SplitPlan, beta: float, min_segment_length: int = 1) -> MergeInput:
    """Run every worker task and collect results by worker index."""
    y = as_series(y)
    if plan.n != y.n:
        raise InvalidConfigError(f"plan built for n = {plan.n}, data has n = {y.n}")
    if len(plan.tasks) == 1:
        results = [_run_task(y, plan.tasks[0], beta, min_segment_length)]
    else:
        with ThreadPoolExecutor(max_workers=_pool_width(len(plan.tasks))) as pool:
            results = list(
                pool.map(lambda t: _run_task(y, t, beta, min_segment_length), plan.tasks)
            )
    parts = [r.changepoints for r in results if r.changepoints.size]
    if parts:
        union = np.unique(np.concatenate(parts))
    else:
        union = np.empty(0, dtype=np.int64)
    return MergeInput(worker_results=tuple(results), union=union)


def run_merge_phase(y, merged: MergeInput, beta: float, min_segment_length: int = 1) -> Segmentation:
    """Re-solve exactly over the union of the workers' changepoints."""
    return optimal_partition(
        y, merged.union, beta, prune=True, min_segment_length=min_segment_length
    )


def detect(y, config: DetectorConfig = DetectorConfig()) -> Segmentation:
    """Run the configured detector on a series.

    ``pelt`` solves over the full candidate set; ``chunk`` and ``deal``
    split, run workers, and merge. Degenerate single-worker parallel runs
    reproduce the serial result exactly.
    """
    y = as_series(y)
    fit_y = y
    if config.normalize_variance:
        fit_y = rescaled(y, estimate_noise_scale(y))
    beta = config.resolved_beta(fit_y)
    min_seg = config.min_segment_length

    if config.method == "pelt":
        seg = optimal_partition(fit_y, None, beta, prune=True, min_segment_length=min_seg)
    else:
        workers = config.resolved_workers()
        if config.method == "chunk":
            plan = chunk_split(y.n, workers, config.resolved_overlap(y.n))
        else:
            bound = math.ceil(math.log(y.n))
            if 1 < workers < bound:
                warnings.warn(
                    f"deal with L = {workers} workers is below the ceil(log n) = {bound} "
                    "consistency bound; accuracy is usually unaffected in practice",
                    stacklevel=2,
                )
            plan = deal_split(y.n, workers)
        merged = run_split_phase(fit_y, plan, beta, min_segment_length=min_seg)
        seg = run_merge_phase(fit_y, merged, beta, min_segment_length=min_seg)

    if config.normalize_variance:
        # Report the cost on the original scale, not the pre-scaled one.
        total = penalised_cost(build_prefix(y), seg.changepoints, beta)
        seg = Segmentation(changepoints=seg.changepoints, penalised_cost=total, n=y.n)
    return seg

"""Scenario generation, accuracy metrics and the timing harness.

Five stock scenarios (A..E) put 2, 3, 6, 9 and 14 mean changes at fixed
proportions of the series; data is piecewise-constant mean plus i.i.d.
Gaussian noise. All randomness flows from one seed through counter-based
Philox streams split per replicate, so results never depend on execution
order or thread count.
"""

from __future__ import annotations

import math
import statistics
import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DetectorConfig,
    InvalidConfigError,
    InvalidInputError,
    PenaltyRule,
    Segmentation,
    TimeSeries,
    as_series,
)
from .parallel import detect

__all__ = [
    "SCENARIO_CHANGES",
    "BenchResult",
    "MetricReport",
    "ScenarioSpec",
    "SimulationResult",
    "bench",
    "generate_series",
    "relative_cost",
    "score",
    "simulate",
    "warm_up",
]

SCENARIO_CHANGES = {"A": 2, "B": 3, "C": 6, "D": 9, "E": 14}

DEFAULT_METHODS = ("pelt", "chunk", "deal")


@dataclass(frozen=True)
class ScenarioSpec:
    """A stock simulation scenario: change proportions, segment means, noise.

    Segment means alternate between 0 and ``delta_mu`` so every adjacent
    pair differs by exactly ``delta_mu``.
    """

    scenario_id: str
    change_proportions: tuple[float, ...]
    segment_means: tuple[float, ...]
    delta_mu: float
    noise_sd: float = 1.0

    def __post_init__(self):
        if self.scenario_id not in SCENARIO_CHANGES:
            raise InvalidConfigError(
                f"unknown scenario {self.scenario_id!r}, expected one of "
                f"{sorted(SCENARIO_CHANGES)}"
            )
        m = SCENARIO_CHANGES[self.scenario_id]
        props = tuple(float(p) for p in self.change_proportions)
        means = tuple(float(v) for v in self.segment_means)
        object.__setattr__(self, "change_proportions", props)
        object.__setattr__(self, "segment_means", means)
        if len(props) != m:
            raise InvalidConfigError(
                f"scenario {self.scenario_id} has {m} changes, got {len(props)} proportions"
            )
        if len(means) != m + 1:
            raise InvalidConfigError(f"need {m + 1} segment means, got {len(means)}")
        if any(not 0.0 < p < 1.0 for p in props) or any(
            b <= a for a, b in zip(props, props[1:])
        ):
            raise InvalidConfigError("change proportions must be strictly increasing in (0, 1)")
        if self.delta_mu < 0:
            raise InvalidConfigError("delta_mu must be >= 0")
        if self.noise_sd < 0:
            raise InvalidConfigError("noise_sd must be >= 0")
        for a, b in zip(means, means[1:]):
            if abs(abs(b - a) - self.delta_mu) > 1e-12:
                raise InvalidConfigError(
                    "adjacent segment means must differ by exactly delta_mu"
                )

    @classmethod
    def standard(cls, scenario_id: str, delta_mu: float, noise_sd: float = 1.0) -> "ScenarioSpec":
        """Evenly spaced change proportions i/(m+1) with 0/delta alternating means."""
        m = SCENARIO_CHANGES.get(scenario_id)
        if m is None:
            raise InvalidConfigError(
                f"unknown scenario {scenario_id!r}, expected one of {sorted(SCENARIO_CHANGES)}"
            )
        props = tuple(i / (m + 1) for i in range(1, m + 1))
        means = tuple(0.0 if k % 2 == 0 else float(delta_mu) for k in range(m + 1))
        return cls(scenario_id, props, means, float(delta_mu), noise_sd)

    @property
    def m(self) -> int:
        return len(self.change_proportions)

    def true_changepoints(self, n: int) -> np.ndarray:
        """tau_i = floor(theta_i * n); rejects collapsed segments."""
        taus = np.array([math.floor(p * n) for p in self.change_proportions], dtype=np.int64)
        if np.unique(taus).size != taus.size:
            raise InvalidConfigError(f"duplicate changepoints at n = {n}; series too short")
        if taus.size and (taus[0] < 1 or taus[-1] > n - 1):
            raise InvalidConfigError(f"changepoints out of (0, n) at n = {n}")
        return taus


def seed_sequence(seed, *spawn_key: int) -> np.random.SeedSequence:
    """Root or split stream: same seed plus a spawn key gives an independent stream."""
    if isinstance(seed, np.random.SeedSequence):
        if spawn_key:
            return np.random.SeedSequence(
                entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + spawn_key
            )
        return seed
    return np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)


def generate_series(spec: ScenarioSpec, n: int, seed) -> tuple[TimeSeries, np.ndarray]:
    """Piecewise-constant mean plus N(0, noise_sd^2) noise, reproducible from seed.

    ``seed`` may be an int or a SeedSequence (as produced by
    :func:`seed_sequence` for per-replicate streams).
    """
    taus = spec.true_changepoints(n)
    bounds = np.concatenate(([0], taus, [n]))
    means = np.repeat(spec.segment_means, np.diff(bounds))
    rng = np.random.Generator(np.random.Philox(seed_sequence(seed)))
    values = means + spec.noise_sd * rng.standard_normal(n)
    return TimeSeries(values), taus


@dataclass(frozen=True)
class MetricReport:
    """Accuracy and cost metrics for one detection run.

    Location errors cover only true changes that were detected (an estimate
    within ceil(ln n) points); ``avg``/``max`` are None when none were.
    """

    false_alarms: int
    missed: int
    location_errors: tuple[int, ...] = ()
    relative_cost: float = 0.0
    wall_time: float | None = None
    speedup_vs_pelt: float | None = None

    @property
    def avg_location_error(self) -> float | None:
        if not self.location_errors:
            return None
        return sum(self.location_errors) / len(self.location_errors)

    @property
    def max_location_error(self) -> int | None:
        return max(self.location_errors) if self.location_errors else None


def _check_increasing(name: str, values: np.ndarray, n: int) -> None:
    if values.size and (values[0] < 1 or values[-1] > n - 1):
        raise InvalidInputError(f"{name} must lie within (0, n)")
    if np.any(np.diff(values) <= 0):
        raise InvalidInputError(f"{name} must be strictly increasing")


def score(true_cp, est_cp, n: int) -> MetricReport:
    """False alarms, misses and location errors at threshold h = ceil(ln n).

    A false alarm is an estimate farther than h from every true change; a
    miss is a true change with no estimate within h. Each detected true
    change contributes the distance to its nearest estimate.
    """
    true = np.asarray(true_cp, dtype=np.int64).ravel()
    est = np.asarray(est_cp, dtype=np.int64).ravel()
    _check_increasing("true changepoints", true, n)
    _check_increasing("estimated changepoints", est, n)
    h = math.ceil(math.log(n))

    if true.size and est.size:
        dist = np.abs(est[:, None] - true[None, :])
        false_alarms = int(np.sum(dist.min(axis=1) > h))
        nearest = dist.min(axis=0)
        detected = nearest <= h
        missed = int(np.sum(~detected))
        errors = tuple(int(e) for e in nearest[detected])
    else:
        false_alarms = int(est.size)
        missed = int(true.size)
        errors = ()
    return MetricReport(false_alarms=false_alarms, missed=missed, location_errors=errors)


def relative_cost(y, est: Segmentation, baseline: Segmentation) -> float:
    """Penalised cost of ``est`` minus the baseline's, on the same data."""
    y = as_series(y)
    if est.n != y.n or baseline.n != y.n:
        raise InvalidInputError(
            f"segmentations are for n = {est.n}/{baseline.n}, data has n = {y.n}"
        )
    return est.penalised_cost - baseline.penalised_cost


_warmed = False


def warm_up() -> None:
    """Compile the detection kernel and spin up a pool before any timing."""
    global _warmed
    if _warmed:
        return
    spec = ScenarioSpec.standard("A", 2.0)
    y, _ = generate_series(spec, 60, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        detect(y, DetectorConfig(method="pelt", beta=5.0))
        detect(y, DetectorConfig(method="chunk", workers=2, overlap=2, beta=5.0))
        detect(y, DetectorConfig(method="deal", workers=2, beta=5.0))
    _warmed = True


def _method_config(
    method: str, workers: int, overlap: int | None, epsilon: float
) -> DetectorConfig:
    rule = PenaltyRule(epsilon=epsilon)
    if method == "pelt":
        return DetectorConfig(method="pelt", penalty=rule)
    if method == "chunk":
        return DetectorConfig(method="chunk", workers=workers, overlap=overlap, penalty=rule)
    return DetectorConfig(method="deal", workers=workers, penalty=rule)


@dataclass(frozen=True)
class SimulationResult:
    rows: list
    summary: dict


def _metric_row(context: dict, report: MetricReport, num_changepoints: int, error: str = "") -> dict:
    row = dict(context)
    row.update(
        false_alarms=report.false_alarms,
        missed=report.missed,
        avg_location_error=report.avg_location_error,
        max_location_error=report.max_location_error,
        relative_cost=report.relative_cost,
        num_changepoints=num_changepoints,
        error=error,
    )
    return row


def _failed_row(context: dict, error: str) -> dict:
    row = dict(context)
    row.update(
        false_alarms=None,
        missed=None,
        avg_location_error=None,
        max_location_error=None,
        relative_cost=None,
        num_changepoints=None,
        error=error,
    )
    return row


def _summarise(rows: list) -> dict:
    groups: dict[tuple[str, int], list] = {}
    for r in rows:
        if r["error"]:
            continue
        groups.setdefault((r["method"], r["workers"]), []).append(r)
    multi = len({w for (m, w) in groups if m != "pelt"}) > 1
    per_method = {}
    for method, workers in sorted(groups):
        group = groups[(method, workers)]
        label = f"{method}@L{workers}" if multi and method != "pelt" else method
        fa = [r["false_alarms"] for r in group]
        miss = [r["missed"] for r in group]
        rc = [r["relative_cost"] for r in group]
        pooled = [e for r in group for e in r["_location_errors"]]
        per_method[label] = {
            "reps": len(group),
            "mean_false_alarms": statistics.fmean(fa),
            "sd_false_alarms": statistics.stdev(fa) if len(fa) > 1 else 0.0,
            "mean_missed": statistics.fmean(miss),
            "sd_missed": statistics.stdev(miss) if len(miss) > 1 else 0.0,
            "mean_relative_cost": statistics.fmean(rc),
            "sd_relative_cost": statistics.stdev(rc) if len(rc) > 1 else 0.0,
            "pooled_avg_location_error": statistics.fmean(pooled) if pooled else None,
            "max_location_error": max(pooled) if pooled else None,
        }
    return per_method


def simulate(
    scenario: str,
    n: int,
    delta_mu: float,
    reps: int,
    seed: int,
    methods=DEFAULT_METHODS,
    workers: int = 4,
    overlap: int | None = None,
    epsilon: float = 0.05,
    noise_sd: float = 1.0,
) -> SimulationResult:
    """Run seeded replicates of every method and collect accuracy metrics.

    The serial solution is always computed as the relative-cost baseline.
    Rows and summary carry no timing, so repeated runs with the same seed
    are identical byte for byte once serialised.
    """
    if reps < 1:
        raise InvalidConfigError("reps must be >= 1")
    spec = ScenarioSpec.standard(scenario, delta_mu, noise_sd)
    for method in methods:
        _method_config(method, workers, overlap, epsilon)  # fail fast on bad configs
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for rep in range(reps):
            y, taus = generate_series(spec, n, seed_sequence(seed, rep))
            baseline = detect(y, _method_config("pelt", workers, overlap, epsilon))
            for method in methods:
                context = {
                    "scenario": scenario,
                    "n": n,
                    "delta_mu": delta_mu,
                    "noise_sd": noise_sd,
                    "method": method,
                    "workers": workers if method != "pelt" else 1,
                    "seed": seed,
                    "rep": rep,
                }
                try:
                    seg = (
                        baseline
                        if method == "pelt"
                        else detect(y, _method_config(method, workers, overlap, epsilon))
                    )
                except (InvalidInputError, InvalidConfigError) as exc:
                    rows.append({**_failed_row(context, str(exc)), "_location_errors": ()})
                    continue
                report = replace(
                    score(taus, seg.changepoints, n),
                    relative_cost=relative_cost(y, seg, baseline),
                )
                row = _metric_row(context, report, seg.num_changepoints)
                row["_location_errors"] = report.location_errors
                rows.append(row)
    summary = {
        "config": {
            "scenario": scenario,
            "n": n,
            "delta_mu": delta_mu,
            "noise_sd": noise_sd,
            "reps": reps,
            "seed": seed,
            "methods": list(methods),
            "workers": workers,
            "overlap": overlap,
            "epsilon": epsilon,
        },
        "per_method": _summarise(rows),
    }
    return SimulationResult(rows=rows, summary=summary)


@dataclass(frozen=True)
class BenchResult:
    metric_rows: list
    timing_rows: list
    summary: dict


def _median_timed_detect(y, config: DetectorConfig, inner_reps: int = 3):
    times = []
    seg = None
    for _ in range(inner_reps):
        t0 = time.perf_counter()
        seg = detect(y, config)
        times.append(time.perf_counter() - t0)
    return seg, statistics.median(times)


def bench(
    scenario: str,
    n: int,
    delta_mu: float,
    workers_list=(1, 2, 4),
    reps: int = 3,
    seed: int = 0,
    methods=("chunk", "deal"),
    overlap: int | None = None,
    epsilon: float = 0.05,
    noise_sd: float = 1.0,
    inner_reps: int = 3,
) -> BenchResult:
    """Time every method/worker-count combination against the serial baseline.

    Data generation is excluded from the timed region; each measurement is
    the median of ``inner_reps`` back-to-back runs on identical data.
    Accuracy metrics land in ``metric_rows`` (deterministic given the seed);
    wall times and speedups land in ``timing_rows``, which are measurements
    and naturally vary between runs. Per-combination failures are recorded
    without aborting the sweep.
    """
    if reps < 1:
        raise InvalidConfigError("reps must be >= 1")
    spec = ScenarioSpec.standard(scenario, delta_mu, noise_sd)
    warm_up()
    metric_rows = []
    timing_rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for rep in range(reps):
            y, taus = generate_series(spec, n, seed_sequence(seed, rep))
            baseline, baseline_time = _median_timed_detect(
                y, _method_config("pelt", 1, overlap, epsilon), inner_reps
            )
            base_context = {"scenario": scenario, "n": n, "delta_mu": delta_mu,
                            "noise_sd": noise_sd, "seed": seed, "rep": rep}
            report = score(taus, baseline.changepoints, n)
            row = _metric_row(
                {**base_context, "method": "pelt", "workers": 1},
                report,
                baseline.num_changepoints,
            )
            row["_location_errors"] = report.location_errors
            metric_rows.append(row)
            timing_rows.append(
                {**base_context, "method": "pelt", "workers": 1,
                 "median_wall_time_s": baseline_time,
                 "baseline_wall_time_s": baseline_time, "speedup_vs_pelt": 1.0,
                 "error": ""}
            )
            for workers in workers_list:
                for method in methods:
                    if method == "pelt":
                        continue
                    context = {**base_context, "method": method, "workers": workers}
                    try:
                        config = _method_config(method, workers, overlap, epsilon)
                        seg, wall = _median_timed_detect(y, config, inner_reps)
                    except (InvalidInputError, InvalidConfigError) as exc:
                        metric_rows.append(
                            {**_failed_row(context, str(exc)), "_location_errors": ()}
                        )
                        timing_rows.append(
                            {**context, "median_wall_time_s": None,
                             "baseline_wall_time_s": baseline_time,
                             "speedup_vs_pelt": None, "error": str(exc)}
                        )
                        continue
                    report = replace(
                        score(taus, seg.changepoints, n),
                        relative_cost=relative_cost(y, seg, baseline),
                    )
                    row = _metric_row(context, report, seg.num_changepoints)
                    row["_location_errors"] = report.location_errors
                    metric_rows.append(row)
                    timing_rows.append(
                        {**context, "median_wall_time_s": wall,
                         "baseline_wall_time_s": baseline_time,
                         "speedup_vs_pelt": baseline_time / wall,
                         "error": ""}
                    )
    summary = {
        "config": {
            "scenario": scenario, "n": n, "delta_mu": delta_mu, "noise_sd": noise_sd,
            "reps": reps, "seed": seed, "methods": list(methods),
            "workers_list": list(workers_list), "overlap": overlap,
            "epsilon": epsilon, "inner_reps": inner_reps,
        },
        "per_method": _summarise(metric_rows),
    }
    return BenchResult(metric_rows=metric_rows, timing_rows=timing_rows, summary=summary)

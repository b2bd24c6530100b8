"""Shared data model: series, candidate sets, segmentations, penalties, configs.

Everything here is immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "METHODS",
    "CandidateSet",
    "DetectorConfig",
    "InvalidConfigError",
    "InvalidInputError",
    "PenaltyRule",
    "Segmentation",
    "TimeSeries",
    "as_series",
    "default_overlap",
    "resolve_penalty",
]

METHODS = ("pelt", "chunk", "deal")


class InvalidInputError(ValueError):
    """Data or operation arguments are malformed."""


class InvalidConfigError(ValueError):
    """A detector or run configuration is inconsistent."""


def _frozen_array(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered numeric observations, univariate or d-dimensional.

    ``values`` is coerced to a read-only float64 array of shape (n, d).
    Univariate data may be passed as a flat sequence.
    """

    values: np.ndarray

    def __post_init__(self):
        try:
            arr = np.asarray(self.values, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"cannot interpret data as a numeric array: {exc}") from exc
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise InvalidInputError(f"expected 1-D or 2-D data, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise InvalidInputError("a series needs at least two observations")
        if arr.shape[1] < 1:
            raise InvalidInputError("observations must have dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("series contains non-finite values")
        object.__setattr__(self, "values", _frozen_array(arr))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def as_series(y) -> TimeSeries:
    """Coerce arrays or sequences to :class:`TimeSeries`; pass instances through."""
    return y if isinstance(y, TimeSeries) else TimeSeries(y)


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Strictly increasing admissible changepoint indices, each in [1, n-1]."""

    indices: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.indices).ravel()
        try:
            idx = raw.astype(np.int64)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"candidate indices must be integers: {exc}") from exc
        if raw.size and not np.array_equal(raw, idx):
            raise InvalidInputError("candidate indices must be integers")
        if idx.size:
            if idx[0] < 1:
                raise InvalidInputError("candidate indices must be >= 1")
            if np.any(np.diff(idx) <= 0):
                raise InvalidInputError("candidate indices must be strictly increasing")
        object.__setattr__(self, "indices", _frozen_array(idx))

    @classmethod
    def full(cls, n: int) -> "CandidateSet":
        """Every admissible index {1, ..., n-1} for a series of length n."""
        return cls(np.arange(1, n, dtype=np.int64))

    def check_bounds(self, n: int) -> None:
        if self.indices.size and self.indices[-1] > n - 1:
            raise InvalidInputError(
                f"candidate {int(self.indices[-1])} out of range for series of length {n}"
            )

    def __len__(self) -> int:
        return int(self.indices.size)


def as_candidates(candidates, n: int) -> np.ndarray:
    """Normalise a candidate spec (CandidateSet, array-like or None) to an array.

    ``None`` means the full set {1, ..., n-1}.
    """
    if candidates is None:
        return np.arange(1, n, dtype=np.int64)
    cs = candidates if isinstance(candidates, CandidateSet) else CandidateSet(candidates)
    cs.check_bounds(n)
    return cs.indices


@dataclass(frozen=True)
class Segmentation:
    """Estimated changepoints 0 < tau_1 < ... < tau_m < n with their penalised cost.

    The cost follows the recursion convention: sum of segment costs plus one
    penalty per fitted changepoint (no penalty for closing the final segment).
    """

    changepoints: tuple[int, ...]
    penalised_cost: float
    n: int

    def __post_init__(self):
        cps = tuple(int(c) for c in self.changepoints)
        object.__setattr__(self, "changepoints", cps)
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise InvalidInputError("changepoints must be strictly increasing")
        if cps and (cps[0] < 1 or cps[-1] > self.n - 1):
            raise InvalidInputError("changepoints must lie in (0, n)")

    @property
    def num_changepoints(self) -> int:
        return len(self.changepoints)

    def segments(self) -> list[tuple[int, int]]:
        """Implied segments as 1-indexed inclusive (start, end) pairs."""
        bounds = (0,) + self.changepoints + (self.n,)
        return [(a + 1, b) for a, b in zip(bounds, bounds[1:])]


@dataclass(frozen=True)
class PenaltyRule:
    """SIC-style penalty family: (2+eps)*ln n univariate, (d+1)(1+eps)*ln n for d >= 2."""

    epsilon: float = 0.05
    dimension: int = 1

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidConfigError("epsilon must be >= 0")
        if self.dimension < 1:
            raise InvalidConfigError("dimension must be >= 1")

    def resolve(self, n: int) -> float:
        return resolve_penalty(self, n)


def resolve_penalty(rule: PenaltyRule, n: int) -> float:
    """Penalty beta for a series of length n under ``rule``.

    Natural logarithms throughout.
    """
    if n < 2:
        raise InvalidInputError(f"need n >= 2 to resolve a penalty, got n={n}")
    if rule.dimension == 1:
        return (2.0 + rule.epsilon) * math.log(n)
    return (rule.dimension + 1.0) * (1.0 + rule.epsilon) * math.log(n)


def default_overlap(n: int) -> int:
    """Recommended chunk overlap V(n) = ceil((ln n)^2)."""
    if n < 2:
        raise InvalidInputError(f"need n >= 2, got n={n}")
    return math.ceil(math.log(n) ** 2)


@dataclass(frozen=True)
class DetectorConfig:
    """How to run a detection: method, worker count, overlap, penalty.

    ``workers=None`` means one worker per available CPU. ``overlap=None``
    resolves to ``default_overlap(n)`` at detection time. ``beta`` overrides
    the penalty rule with an explicit value. ``normalize_variance`` pre-scales
    each dimension by a robust noise-scale estimate before fitting; the cost
    reported on the result is always re-evaluated on the original data.
    """

    method: str = "pelt"
    workers: int | None = None
    overlap: int | None = None
    penalty: PenaltyRule | None = None
    beta: float | None = None
    min_segment_length: int = 1
    normalize_variance: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.workers is not None and self.workers < 1:
            raise InvalidConfigError("workers must be >= 1")
        if self.overlap is not None and self.overlap < 0:
            raise InvalidConfigError("overlap must be >= 0")
        if self.beta is not None and self.beta <= 0:
            raise InvalidConfigError("beta must be > 0")
        if self.min_segment_length < 1:
            raise InvalidConfigError("min_segment_length must be >= 1")

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        return os.cpu_count() or 1

    def resolved_overlap(self, n: int) -> int:
        return self.overlap if self.overlap is not None else default_overlap(n)

    def resolved_beta(self, y: TimeSeries) -> float:
        if self.beta is not None:
            return self.beta
        rule = self.penalty
        if rule is None:
            rule = PenaltyRule(dimension=y.d)
        elif rule.dimension != y.d:
            raise InvalidConfigError(
                f"penalty rule is for dimension {rule.dimension}, data has dimension {y.d}"
            )
        return resolve_penalty(rule, y.n)

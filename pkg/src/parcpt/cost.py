"""Squared-error segment costs: O(1) per segment after O(n) prefix work.

The single cost family implemented here is the residual sum of squares of a
constant fit (Gaussian change-in-mean), summed across dimensions for d > 1.
Alternative losses would slot in behind the same build/evaluate seam.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError, TimeSeries, as_series

__all__ = [
    "PrefixSums",
    "build_prefix",
    "estimate_noise_scale",
    "penalised_cost",
    "segment_cost",
]

# Normal-consistency constant for the median absolute deviation.
_MAD_TO_SD = 0.6744897501960817


@dataclass(frozen=True, eq=False)
class PrefixSums:
    """Per-dimension cumulative sums and sums of squares with a leading zero row.

    ``cum[t] - cum[s-1]`` equals the sum of observations s..t (1-indexed,
    inclusive) in each dimension; ``sq_total`` is ``cum_sq`` summed across
    dimensions, kept separately because the cost kernel consumes it directly.
    """

    cum: np.ndarray      # (n+1, d)
    cum_sq: np.ndarray   # (n+1, d)
    sq_total: np.ndarray  # (n+1,)

    @property
    def n(self) -> int:
        return self.cum.shape[0] - 1

    @property
    def d(self) -> int:
        return self.cum.shape[1]


def build_prefix(y) -> PrefixSums:
    """Accumulate prefix sums and sums of squares for a series."""
    y = as_series(y)
    cum = np.zeros((y.n + 1, y.d))
    cum_sq = np.zeros((y.n + 1, y.d))
    np.cumsum(y.values, axis=0, out=cum[1:])
    np.cumsum(y.values * y.values, axis=0, out=cum_sq[1:])
    sq_total = np.ascontiguousarray(cum_sq.sum(axis=1))
    for arr in (cum, cum_sq, sq_total):
        arr.flags.writeable = False
    return PrefixSums(cum=cum, cum_sq=cum_sq, sq_total=sq_total)


def segment_cost(p: PrefixSums, s: int, t: int) -> float:
    """Residual sum of squares of observations s..t (1-indexed, inclusive).

    Never negative: tiny negative values from catastrophic cancellation on
    near-constant segments are clamped to 0.
    """
    if not 1 <= s <= t <= p.n:
        raise InvalidInputError(f"segment [{s}, {t}] invalid for series of length {p.n}")
    length = t - s + 1
    diff = p.cum[t] - p.cum[s - 1]
    cost = float(p.sq_total[t] - p.sq_total[s - 1]) - float((diff * diff / length).sum())
    return cost if cost > 0.0 else 0.0


def penalised_cost(p: PrefixSums, changepoints, beta: float) -> float:
    """Total cost of a segmentation: segment costs plus beta per changepoint.

    Accumulated left to right, one beta as each interior segment closes and
    none for the final segment, matching the recursion's bookkeeping exactly.
    """
    total = 0.0
    prev = 0
    for cp in changepoints:
        cp = int(cp)
        if not prev < cp < p.n:
            raise InvalidInputError("changepoints must be strictly increasing in (0, n)")
        total = total + segment_cost(p, prev + 1, cp) + beta
        prev = cp
    return total + segment_cost(p, prev + 1, p.n)


def estimate_noise_scale(y) -> np.ndarray:
    """Per-dimension noise sd estimate from the MAD of first differences.

    Robust to a small number of mean shifts. Dimensions estimated at exactly
    zero scale (constant data) come back as 1.0 so pre-scaling is a no-op.
    """
    y = as_series(y)
    diffs = np.diff(y.values, axis=0)
    mad = np.median(np.abs(diffs - np.median(diffs, axis=0)), axis=0)
    scale = mad / (_MAD_TO_SD * np.sqrt(2.0))
    scale[scale == 0.0] = 1.0
    return scale


def rescaled(y: TimeSeries, scale: np.ndarray) -> TimeSeries:
    """Series divided dimension-wise by ``scale``."""
    return TimeSeries(y.values / scale)

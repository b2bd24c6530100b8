"""Exact penalised-cost minimisation over a restricted candidate set.

The recursion fills F(b) = min_t { F(t) + C(y_{t+1:b}) + beta } over the
sorted candidates, with F(0) = 0 and a final unpenalised evaluation at the
series end. Pruning drops previous-changepoint candidates that can never be
optimal again; for the squared-error cost this keeps the result exact.

``optimal_partition`` runs a compiled kernel. ``partition_by_steps`` walks
the same recursion through an inspectable :class:`DpState`, one step at a
time, and is handy for tracing live-set behaviour.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import InvalidInputError, Segmentation, as_candidates, as_series
from .cost import PrefixSums, build_prefix, segment_cost

__all__ = [
    "PRUNE_SLACK",
    "DpState",
    "brute_force_partition",
    "init_dp_state",
    "dp_step",
    "optimal_partition",
    "partition_by_steps",
    "pelt_prune",
]

# Absolute slack on the pruning inequality so exact ties stay live and the
# pruned and unpruned recursions return identical segmentations.
PRUNE_SLACK = 1e-12

_BRUTE_FORCE_LIMIT = 20


@njit(cache=True, nogil=True)
def _partition_kernel(cum, sq_total, cands, beta, prune, min_seg):
    """Fill F over candidate slots and backtrack the argmin changepoints.

    Slot 0 is the left boundary (index 0), slots 1..k the candidates in
    order, slot k+1 the series end n where no penalty is charged. Ties in
    the argmin go to the smallest previous index; pruning keeps exact ties
    live (slack) so it never changes the outcome.
    """
    n = cum.shape[0] - 1
    d = cum.shape[1]
    k = cands.shape[0]

    F = np.empty(k + 2)
    bp = np.empty(k + 2, np.int64)
    live = np.empty(k + 1, np.int64)
    fits = np.empty(k + 1)
    F[0] = 0.0
    bp[0] = -1
    live[0] = 0
    nlive = 1

    for j in range(1, k + 2):
        s = cands[j - 1] if j <= k else n
        best = np.inf
        arg = -1
        for li in range(nlive):
            slot = live[li]
            t = 0 if slot == 0 else cands[slot - 1]
            if s - t < min_seg:
                fits[li] = -1.0  # ineligible this round; never prunable on it
                continue
            seglen = s - t
            c = sq_total[s] - sq_total[t]
            acc = 0.0
            for dim in range(d):
                diff = cum[s, dim] - cum[t, dim]
                acc += diff * diff / seglen
            c -= acc
            if c < 0.0:
                c = 0.0
            v = F[slot] + c
            fits[li] = v
            if v < best:
                best = v
                arg = slot
        if j <= k:
            F[j] = best + beta
            bp[j] = arg
            if prune and best < np.inf:
                threshold = F[j] + PRUNE_SLACK
                w = 0
                for li in range(nlive):
                    if fits[li] < 0.0 or fits[li] < threshold:
                        live[w] = live[li]
                        w += 1
                nlive = w
            live[nlive] = j
            nlive += 1
        else:
            F[j] = best
            bp[j] = arg

    count = 0
    slot = bp[k + 1]
    while slot > 0:
        count += 1
        slot = bp[slot]
    cps = np.empty(count, np.int64)
    slot = bp[k + 1]
    i = count - 1
    while slot > 0:
        cps[i] = cands[slot - 1]
        i -= 1
        slot = bp[slot]
    return cps, F[k + 1]


def optimal_partition(
    y,
    candidates=None,
    beta: float | None = None,
    prune: bool = True,
    min_segment_length: int = 1,
) -> Segmentation:
    """Minimise the penalised cost with changepoints restricted to ``candidates``.

    Parameters
    ----------
    y : TimeSeries or array-like
        Observations, univariate or d-dimensional.
    candidates : CandidateSet, array-like or None
        Admissible changepoint indices in [1, n-1]; ``None`` means all of them.
    beta : float
        Penalty per fitted changepoint, > 0.
    prune : bool
        Drop dominated previous-changepoint candidates as the recursion
        advances. The result is identical with pruning on or off.
    min_segment_length : int
        Minimum observations per segment. Values > 1 disable pruning, which
        is only exactness-preserving for unconstrained segment lengths.

    Returns
    -------
    Segmentation
    """
    y = as_series(y)
    if beta is None or beta <= 0:
        raise InvalidInputError(f"beta must be > 0, got {beta}")
    if min_segment_length < 1:
        raise InvalidInputError("min_segment_length must be >= 1")
    if min_segment_length > y.n:
        raise InvalidInputError("min_segment_length exceeds the series length")
    cands = as_candidates(candidates, y.n)
    p = build_prefix(y)
    effective_prune = prune and min_segment_length == 1
    cps, total = _partition_kernel(
        p.cum, p.sq_total, cands, float(beta), effective_prune, min_segment_length
    )
    return Segmentation(changepoints=tuple(int(c) for c in cps), penalised_cost=float(total), n=y.n)


@dataclass
class DpState:
    """Recursion state: F values, backpointers and the live candidate set.

    Keys of ``F`` and ``backpointer`` are data indices (0 for the left
    boundary, candidate indices, finally n). ``live_set`` holds the
    unpruned previous-changepoint candidates in increasing order.
    """

    prefix: PrefixSums
    beta: float
    F: dict[int, float] = field(default_factory=dict)
    backpointer: dict[int, int] = field(default_factory=dict)
    live_set: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.F:
            self.F[0] = 0.0
            self.live_set.append(0)


def init_dp_state(y, beta: float) -> DpState:
    """Fresh state with F(0) = 0 and only the left boundary live."""
    if beta <= 0:
        raise InvalidInputError(f"beta must be > 0, got {beta}")
    return DpState(prefix=build_prefix(as_series(y)), beta=beta)


def dp_step(state: DpState, s: int, final: bool = False) -> DpState:
    """Evaluate F at index ``s`` from the current live set.

    Interior steps charge the penalty and add ``s`` to the live set; the
    final step (s = n) charges nothing and leaves the live set alone.
    """
    best = np.inf
    arg = -1
    for t in state.live_set:
        v = state.F[t] + segment_cost(state.prefix, t + 1, s)
        if v < best:
            best = v
            arg = t
    state.F[s] = best if final else best + state.beta
    state.backpointer[s] = arg
    if not final:
        state.live_set.append(s)
    return state


def pelt_prune(state: DpState, s: int) -> list[int]:
    """Drop every live t whose fit through s is already beaten by F(s).

    Removal condition F(t) + C(y_{t+1:s}) >= F(s), applied with absolute
    slack so exact ties survive; by cost subadditivity a removed t can never
    appear in a later optimum (K = 0 for the squared-error cost).
    """
    f_s = state.F[s]
    kept = [
        t
        for t in state.live_set
        if t == s
        or state.F[t] + segment_cost(state.prefix, t + 1, s) - f_s < PRUNE_SLACK
    ]
    state.live_set = kept
    return kept


def partition_by_steps(y, candidates=None, beta: float | None = None, prune: bool = True) -> Segmentation:
    """Stepwise equivalent of :func:`optimal_partition` built on ``DpState``.

    Slower by a wide margin; exists for tracing and cross-checking the
    compiled kernel.
    """
    y = as_series(y)
    cands = as_candidates(candidates, y.n)
    state = init_dp_state(y, beta)
    for s in cands:
        dp_step(state, int(s))
        if prune:
            pelt_prune(state, int(s))
    dp_step(state, y.n, final=True)

    cps = []
    t = state.backpointer[y.n]
    while t > 0:
        cps.append(t)
        t = state.backpointer[t]
    cps.reverse()
    return Segmentation(changepoints=tuple(cps), penalised_cost=float(state.F[y.n]), n=y.n)


def _direct_cost_table(values: np.ndarray) -> np.ndarray:
    """(n+1) x (n+1) table of segment costs by direct summation (1-indexed)."""
    n = values.shape[0]
    table = np.zeros((n + 1, n + 1))
    for s in range(1, n + 1):
        for t in range(s, n + 1):
            seg = values[s - 1 : t]
            mean = seg.mean(axis=0)
            table[s, t] = float(((seg - mean) ** 2).sum())
    return table


def brute_force_partition(y, candidates=None, beta: float | None = None) -> Segmentation:
    """Exhaustive minimiser over all subsets of the candidate set.

    Independent oracle: costs come from direct per-segment summation, not
    prefix sums, and no recursion is involved. Ties break toward fewer
    changepoints, then the lexicographically smallest changepoint vector.
    Refuses more than 20 candidates.
    """
    y = as_series(y)
    if beta is None or beta <= 0:
        raise InvalidInputError(f"beta must be > 0, got {beta}")
    cands = as_candidates(candidates, y.n)
    if cands.size > _BRUTE_FORCE_LIMIT:
        raise InvalidInputError(
            f"brute force limited to {_BRUTE_FORCE_LIMIT} candidates, got {cands.size}"
        )
    table = _direct_cost_table(y.values)

    best_cost = np.inf
    best_cps: tuple[int, ...] = ()
    cand_list = [int(c) for c in cands]
    for size in range(len(cand_list) + 1):
        for subset in itertools.combinations(cand_list, size):
            bounds = (0,) + subset + (y.n,)
            cost = beta * size
            for a, b in zip(bounds, bounds[1:]):
                cost += table[a + 1, b]
            if cost < best_cost:
                best_cost = cost
                best_cps = subset
    return Segmentation(changepoints=best_cps, penalised_cost=float(best_cost), n=y.n)

"""Watching the pruning rule at work, one recursion step at a time.

The stepwise API exposes the recursion state: F values, backpointers and
the live set of previous-changepoint candidates. On data with a clear mean
shift, candidates from before the shift become provably non-optimal soon
after it and get dropped, which is where the speed of the pruned recursion
comes from. On featureless data nothing can be pruned and the live set
just grows.
"""

import numpy as np

from parcpt import dp_step, init_dp_state, pelt_prune

rng = np.random.default_rng(2)


def trace_live_sizes(y, beta):
    state = init_dp_state(y, beta)
    sizes = []
    for s in range(1, len(y)):
        dp_step(state, s)
        pelt_prune(state, s)
        sizes.append(len(state.live_set))
    return sizes


n = 120
flat = rng.normal(size=n)
shifted = flat + np.repeat([0.0, 6.0, 0.0], 40)
beta = 2 * np.log(n)

flat_sizes = trace_live_sizes(flat, beta)
shift_sizes = trace_live_sizes(shifted, beta)

print("live-set size after each step (bigger = more work next step)")
print("index:          ", "".join(f"{i:4d}" for i in range(10, n, 10)))
print("no change:      ", "".join(f"{flat_sizes[i - 1]:4d}" for i in range(10, n, 10)))
print("shifts at 40/80:", "".join(f"{shift_sizes[i - 1]:4d}" for i in range(10, n, 10)))
print()
print(f"peak live set without changes: {max(flat_sizes)}")
print(f"peak live set with changes:    {max(shift_sizes)}")
print()
print("the collapses just after indices 40 and 80 are the pruning rule")
print("retiring every candidate that predates the detected shift")

"""Restricting changepoints to a candidate set, and checking against brute force.

The recursion stays exact when changepoints are confined to any subset B of
{1, ..., n-1}: it returns the best segmentation whose changes all lie in B.
On tiny inputs we can afford to enumerate every subset of B and confirm.
"""

import numpy as np

from parcpt import brute_force_partition, optimal_partition

y = np.array([0.0, 0.2, -0.1, 6.0, 6.3, 5.8, 0.1, -0.2, 0.0, 0.1])
beta = 2.0

print("data:", y.tolist())
print()

for label, cands in [
    ("all indices", None),
    ("only {2, 5, 8}", [2, 5, 8]),
    ("only even", [2, 4, 6, 8]),
]:
    fast = optimal_partition(y, cands, beta)
    oracle = brute_force_partition(y, cands, beta)
    agree = (
        fast.changepoints == oracle.changepoints
        and abs(fast.penalised_cost - oracle.penalised_cost) < 1e-9
    )
    match = "ok" if agree else "MISMATCH"
    print(f"{label:16s} -> {fast.changepoints} cost {fast.penalised_cost:8.3f}   "
          f"exhaustive search agrees: {match}")

print()
print("raising the penalty thins the fit:")
for beta in (0.5, 2.0, 10.0, 60.0):
    seg = optimal_partition(y, None, beta)
    print(f"  beta {beta:5.1f} -> {seg.changepoints}")

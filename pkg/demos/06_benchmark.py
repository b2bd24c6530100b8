"""Timing the schedulers against the serial baseline.

Each measurement is the median of three back-to-back runs on identical,
pre-generated data (generation never counts toward the clock). At small n
the fixed costs of planning and pooling dominate and the parallel methods
lose; at larger n the quadratic worst case of the serial recursion takes
over and they win. Deal additionally does ~L times less total work in its
split phase, so it gains even without spare cores.
"""

from parcpt import bench, warm_up

warm_up()  # compile the kernel outside the timed region

for n in (2_000, 40_000):
    result = bench(
        scenario="C",
        n=n,
        delta_mu=1.0,
        workers_list=(4,),
        reps=1,
        seed=7,
        methods=("chunk", "deal"),
    )
    print(f"\nn = {n}, scenario C, delta = 1.0, L = 4")
    for row in result.timing_rows:
        if row["error"]:
            print(f"  {row['method']:6s} skipped: {row['error']}")
            continue
        print(
            f"  {row['method']:6s} L={row['workers']}: {row['median_wall_time_s'] * 1e3:9.1f} ms"
            f"   speedup vs serial {row['speedup_vs_pelt']:5.2f}"
        )

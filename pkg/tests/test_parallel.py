import math

import numpy as np
import pytest

from parcpt.core import DetectorConfig, InvalidConfigError, PenaltyRule
from parcpt.dp import brute_force_partition, optimal_partition
from parcpt.parallel import (
    chunk_split,
    deal_quota,
    deal_split,
    detect,
    run_merge_phase,
    run_split_phase,
)

STEP = [0.0, 0.0, 0.0, 0.0, 10.0, 10.0, 10.0, 10.0]


def _cand_lists(plan):
    return [task.candidates.tolist() for task in plan.tasks]


class TestChunkSplit:
    def test_two_workers(self):
        plan = chunk_split(100, 2, 5)
        assert _cand_lists(plan) == [list(range(1, 56)), list(range(45, 100))]

    def test_interior_window(self):
        plan = chunk_split(100, 4, 5)
        assert plan.tasks[1].candidates.tolist() == list(range(20, 56))

    def test_single_worker_degenerates(self):
        plan = chunk_split(100, 1, 0)
        assert _cand_lists(plan) == [list(range(1, 100))]
        assert (plan.tasks[0].window_start, plan.tasks[0].window_stop) == (1, 100)

    def test_data_windows_cover_everything(self):
        for n, L, V in [(100, 2, 5), (100, 4, 5), (1000, 7, 20), (8, 2, 2)]:
            plan = chunk_split(n, L, V)
            seen = np.zeros(n + 1, dtype=bool)
            for task in plan.tasks:
                seen[task.window_start : task.window_stop + 1] = True
            assert seen[1:].all()
            assert plan.tasks[-1].window_stop == n

    def test_candidates_cover_and_overlap(self):
        for n, L, V in [(100, 4, 5), (1000, 7, 20)]:
            plan = chunk_split(n, L, V)
            union = np.unique(np.concatenate([t.candidates for t in plan.tasks]))
            assert union.tolist() == list(range(1, n))
            for a, b in zip(plan.tasks, plan.tasks[1:-1]):
                shared = np.intersect1d(a.candidates, b.candidates)
                assert shared.size == 2 * V + 1

    @pytest.mark.parametrize(
        "n,L,V",
        [
            (10, 2, 6),    # window floor(n/L)+V reaches n
            (31, 2, 15),   # second window would start at 0
            (100, 4, 13),  # overlap regions intersect for L >= 3
            (10, 0, 0),
            (10, 2, -1),
        ],
    )
    def test_rejects_bad_configs(self, n, L, V):
        with pytest.raises(InvalidConfigError):
            chunk_split(n, L, V)


class TestDealSplit:
    def test_quota(self):
        assert deal_quota(1, 3, 10) == 2
        assert deal_quota(3, 3, 10) == 3  # 3*3 + 0 < 10

    def test_three_workers(self):
        plan = deal_split(10, 3)
        assert _cand_lists(plan) == [[1, 4, 7], [2, 5, 8], [3, 6, 9]]

    def test_single_worker_degenerates(self):
        assert _cand_lists(deal_split(10, 1)) == [list(range(1, 10))]

    def test_partition_matches_quota_display(self):
        for n, L in [(10, 3), (100, 7), (57, 5)]:
            plan = deal_split(n, L)
            union = np.concatenate([t.candidates for t in plan.tasks])
            assert np.unique(union).size == union.size  # pairwise disjoint
            assert np.array_equal(np.sort(union), np.arange(1, n))
            for i, task in enumerate(plan.tasks, start=1):
                assert task.candidates[-1] == deal_quota(i, L, n) * L + (i % L)
                assert (task.window_start, task.window_stop) == (1, n)

    def test_rejects_too_many_workers(self):
        with pytest.raises(InvalidConfigError):
            deal_split(10, 10)


class TestSplitPhase:
    def test_constant_series_returns_nothing(self):
        y = np.zeros(40)
        for plan in (chunk_split(40, 4, 2), deal_split(40, 4)):
            merged = run_split_phase(y, plan, 2 * math.log(40))
            assert merged.union.size == 0
            assert all(r.changepoints.size == 0 for r in merged.worker_results)

    def test_step_series_chunk_workers(self):
        plan = chunk_split(8, 2, 2)
        merged = run_split_phase(STEP, plan, 1.0)
        first = merged.worker_results[0]
        assert (first.window_start, first.window_stop) == (1, 6)
        assert first.changepoints.tolist() == [4]
        assert 4 in merged.union
        # every worker's report is oracle-correct for its own window
        for task, result in zip(plan.tasks, merged.worker_results):
            window = np.asarray(STEP)[task.window_start - 1 : task.window_stop]
            local = task.candidates - (task.window_start - 1)
            local = local[local < len(window)]
            oracle = brute_force_partition(window, local, 1.0)
            expected = [c + task.window_start - 1 for c in oracle.changepoints]
            assert result.changepoints.tolist() == expected

    def test_step_series_deal_workers(self):
        plan = deal_split(8, 2)
        merged = run_split_phase(STEP, plan, 1.0)
        by_worker = {tuple(t.candidates): r for t, r in zip(plan.tasks, merged.worker_results)}
        assert by_worker[(2, 4, 6)].changepoints.tolist() == [4]
        # oracle over {1,3,5,7}: isolating the mismatched point 4 beats any single cut
        assert by_worker[(1, 3, 5, 7)].changepoints.tolist() == [3, 5]
        assert merged.union.tolist() == [3, 4, 5]

    def test_scheduling_independent(self, monkeypatch):
        rng = np.random.default_rng(15)
        y = rng.normal(size=300) + np.repeat([0.0, 4.0, 0.0], 100)
        plan = deal_split(300, 5)
        beta = 2 * math.log(300)
        baseline = run_split_phase(y, plan, beta)
        for threads in ("1", "2", "7"):
            monkeypatch.setenv("PARCPT_THREADS", threads)
            again = run_split_phase(y, plan, beta)
            assert again.union.tolist() == baseline.union.tolist()
            for a, b in zip(baseline.worker_results, again.worker_results):
                assert a.changepoints.tolist() == b.changepoints.tolist()
                assert a.penalised_cost == b.penalised_cost

    def test_invalid_thread_cap_rejected(self, monkeypatch):
        monkeypatch.setenv("PARCPT_THREADS", "zero")
        with pytest.raises(InvalidConfigError):
            run_split_phase(STEP, deal_split(8, 2), 1.0)

    def test_plan_data_mismatch_rejected(self):
        with pytest.raises(InvalidConfigError):
            run_split_phase(STEP, deal_split(10, 2), 1.0)


class TestMergePhase:
    def test_empty_union(self):
        merged = run_split_phase(np.zeros(8), deal_split(8, 2), 1.0)
        seg = run_merge_phase(np.zeros(8), merged, 1.0)
        assert seg.changepoints == ()

    def test_union_around_step(self):
        merged = run_split_phase(STEP, deal_split(8, 2), 1.0)
        assert merged.union.tolist() == [3, 4, 5]
        seg = run_merge_phase(STEP, merged, 1.0)
        assert seg.changepoints == (4,)
        assert seg.penalised_cost == pytest.approx(1.0)
        assert seg == brute_force_partition(STEP, [3, 4, 5], 1.0)

    def test_union_equal_to_serial_solution_is_fixed_point(self):
        rng = np.random.default_rng(21)
        y = rng.normal(size=120) + np.repeat([0.0, 5.0, 1.0], 40)
        beta = 2 * math.log(120)
        serial = optimal_partition(y, None, beta)
        refit = optimal_partition(y, np.array(serial.changepoints), beta)
        assert refit == serial

    def test_merge_never_beats_serial_with_tolerance(self):
        rng = np.random.default_rng(33)
        beta = 2 * math.log(200)
        for _ in range(10):
            y = rng.normal(size=200) + np.repeat(rng.normal(0, 2, 4), 50)
            serial = optimal_partition(y, None, beta)
            for plan in (chunk_split(200, 4, 10), deal_split(200, 4)):
                merged = run_split_phase(y, plan, beta)
                seg = run_merge_phase(y, merged, beta)
                assert seg.penalised_cost >= serial.penalised_cost - 1e-9


class TestDetect:
    def test_constant_series_all_methods(self):
        y = np.full(60, 2.5)
        for cfg in (
            DetectorConfig(method="pelt"),
            DetectorConfig(method="chunk", workers=3, overlap=4),
            DetectorConfig(method="deal", workers=3),
        ):
            assert detect(y, cfg).changepoints == ()

    def test_step_series_chunk(self):
        seg = detect(STEP, DetectorConfig(method="chunk", workers=2, overlap=2, beta=1.0))
        assert seg.changepoints == (4,)
        assert seg.penalised_cost == pytest.approx(1.0)

    def test_step_series_deal(self):
        with pytest.warns(UserWarning):
            seg = detect(STEP, DetectorConfig(method="deal", workers=2, beta=1.0))
        assert seg.changepoints == (4,)
        assert seg.penalised_cost == pytest.approx(1.0)

    def test_single_worker_degeneracy(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            y = rng.normal(size=150) + np.repeat(rng.normal(0, 2, 3), 50)
            serial = detect(y, DetectorConfig(method="pelt"))
            chunk1 = detect(y, DetectorConfig(method="chunk", workers=1, overlap=0))
            deal1 = detect(y, DetectorConfig(method="deal", workers=1))
            assert chunk1 == serial
            assert deal1 == serial

    def test_deal_below_bound_warns(self):
        y = np.zeros(100)
        with pytest.warns(UserWarning, match="consistency bound"):
            detect(y, DetectorConfig(method="deal", workers=2))

    def test_repeated_runs_identical(self):
        rng = np.random.default_rng(4)
        y = rng.normal(size=400) + np.repeat([0, 3, 0, 3], 100)
        cfg = DetectorConfig(method="chunk", workers=4, overlap=12)
        assert detect(y, cfg) == detect(y, cfg)

    def test_parallel_results_recomputable_from_data(self):
        from parcpt.core import TimeSeries
        from parcpt.cost import build_prefix, penalised_cost

        rng = np.random.default_rng(23)
        y = TimeSeries(rng.normal(size=240) + np.repeat([0, 4, 1, 5], 60))
        p = build_prefix(y)
        beta = DetectorConfig().resolved_beta(y)
        for cfg in (
            DetectorConfig(method="chunk", workers=3, overlap=10),
            DetectorConfig(method="deal", workers=3),
        ):
            seg = detect(y, cfg)
            assert seg.penalised_cost == pytest.approx(
                penalised_cost(p, seg.changepoints, beta), rel=1e-9
            )

    def test_multivariate_parallel_matches_serial(self):
        rng = np.random.default_rng(27)
        y = rng.normal(size=(240, 3)) + np.repeat(
            rng.normal(0, 3, (4, 3)), 60, axis=0
        )
        serial = detect(y, DetectorConfig(method="pelt"))
        chunk = detect(y, DetectorConfig(method="chunk", workers=3, overlap=10))
        deal = detect(y, DetectorConfig(method="deal", workers=3))
        assert serial.changepoints  # the shifts are large enough to find
        assert chunk.penalised_cost >= serial.penalised_cost - 1e-9
        assert deal.penalised_cost >= serial.penalised_cost - 1e-9
        assert chunk.changepoints == serial.changepoints
        assert deal.changepoints == serial.changepoints

    def test_normalize_variance_reports_original_scale_cost(self):
        rng = np.random.default_rng(19)
        y = np.concatenate([rng.normal(0, 4, 150), rng.normal(30, 4, 150)])
        cfg = DetectorConfig(method="pelt", normalize_variance=True)
        seg = detect(y, cfg)
        assert len(seg.changepoints) == 1
        assert abs(seg.changepoints[0] - 150) <= 3
        from parcpt.cost import build_prefix, penalised_cost

        beta = PenaltyRule(dimension=1).resolve(300)
        recomputed = penalised_cost(build_prefix(y), seg.changepoints, beta)
        assert seg.penalised_cost == pytest.approx(recomputed, rel=1e-9)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parcpt.core import InvalidInputError, TimeSeries
from parcpt.cost import (
    build_prefix,
    estimate_noise_scale,
    penalised_cost,
    segment_cost,
)


def _direct_cost(values, s, t):
    seg = np.asarray(values, dtype=float)[s - 1 : t]
    return float(((seg - seg.mean(axis=0)) ** 2).sum())


class TestBuildPrefix:
    def test_simple_accumulation(self):
        p = build_prefix([1.0, 2.0, 3.0])
        assert p.cum[:, 0].tolist() == [0, 1, 3, 6]
        assert p.cum_sq[:, 0].tolist() == [0, 1, 5, 14]

    def test_zero_series(self):
        p = build_prefix([0.0, 0.0])
        assert p.cum[:, 0].tolist() == [0, 0, 0]
        assert p.cum_sq[:, 0].tolist() == [0, 0, 0]

    def test_cancellation(self):
        p = build_prefix([2.0, -2.0])
        assert p.cum[:, 0].tolist() == [0, 2, 0]
        assert p.cum_sq[:, 0].tolist() == [0, 4, 8]

    def test_window_sums_match_direct(self):
        rng = np.random.default_rng(0)
        y = rng.normal(size=(60, 2))
        p = build_prefix(y)
        for s, t in [(1, 1), (1, 60), (7, 23), (59, 60)]:
            direct = y[s - 1 : t].sum(axis=0)
            np.testing.assert_allclose(p.cum[t] - p.cum[s - 1], direct, rtol=1e-9)


class TestSegmentCost:
    def test_constant_segment_is_free(self):
        assert segment_cost(build_prefix([3.0, 3.0, 3.0]), 1, 3) == 0.0

    def test_two_points(self):
        assert segment_cost(build_prefix([0.0, 2.0]), 1, 2) == pytest.approx(2.0)

    def test_four_points(self):
        # mean 2.5 -> 2.25 + 0.25 + 0.25 + 2.25
        assert segment_cost(build_prefix([1.0, 2.0, 3.0, 4.0]), 1, 4) == pytest.approx(5.0)

    def test_two_dimensional(self):
        p = build_prefix([[0.0, 0.0], [2.0, 2.0]])
        assert segment_cost(p, 1, 2) == pytest.approx(4.0)

    @pytest.mark.parametrize("s,t", [(0, 2), (2, 1), (1, 9)])
    def test_rejects_bad_ranges(self, s, t):
        with pytest.raises(InvalidInputError):
            segment_cost(build_prefix(np.zeros(5)), s, t)

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(7)
        y = rng.normal(size=200) * 10 + 5
        p = build_prefix(y)
        for _ in range(300):
            s = int(rng.integers(1, 200))
            t = int(rng.integers(s, 201))
            direct = _direct_cost(y, s, t)
            assert segment_cost(p, s, t) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_near_constant_segment_clamped_not_negative(self):
        y = np.full(5000, 1e8) + 1e-8
        p = build_prefix(y)
        assert segment_cost(p, 1, 5000) >= 0.0

    @given(
        st.lists(st.floats(-100, 100), min_size=2, max_size=40),
        st.data(),
    )
    @settings(max_examples=150, deadline=None)
    def test_subadditive_under_splits(self, values, data):
        n = len(values)
        s = data.draw(st.integers(1, n - 1))
        t = data.draw(st.integers(s + 1, n))
        u = data.draw(st.integers(s, t - 1))
        p = build_prefix(values)
        whole = segment_cost(p, s, t)
        split = segment_cost(p, s, u) + segment_cost(p, u + 1, t)
        assert split <= whole + 1e-9 * max(1.0, whole)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30))
    @settings(max_examples=150, deadline=None)
    def test_nonnegative_and_zero_iff_constant(self, values):
        p = build_prefix(values)
        cost = segment_cost(p, 1, len(values))
        assert cost >= 0.0
        spread = max(values) - min(values)
        if spread == 0.0:
            # constant segments are zero up to prefix-sum cancellation noise
            assert cost <= 1e-9 * max(1.0, float(p.sq_total[-1]))
        elif spread > 1e-3:
            assert cost > 0.0


class TestPenalisedCost:
    def test_matches_manual_total(self):
        y = [0.0, 0.0, 0.0, 0.0, 10.0, 10.0, 10.0, 10.0]
        p = build_prefix(y)
        assert penalised_cost(p, (4,), 1.0) == pytest.approx(1.0)
        assert penalised_cost(p, (), 1.0) == pytest.approx(_direct_cost(y, 1, 8))
        two = segment_cost(p, 1, 2) + segment_cost(p, 3, 8) + 1.0
        assert penalised_cost(p, (2,), 1.0) == pytest.approx(two)

    def test_rejects_disordered_changepoints(self):
        p = build_prefix(np.zeros(6))
        with pytest.raises(InvalidInputError):
            penalised_cost(p, (4, 2), 1.0)


class TestNoiseScale:
    def test_recovers_sd_despite_shifts(self):
        rng = np.random.default_rng(3)
        y = np.concatenate([rng.normal(0, 2.5, 3000), rng.normal(50, 2.5, 3000)])
        est = estimate_noise_scale(TimeSeries(y))[0]
        assert est == pytest.approx(2.5, rel=0.1)

    def test_constant_series_scale_is_one(self):
        assert estimate_noise_scale(TimeSeries(np.ones(50)))[0] == 1.0

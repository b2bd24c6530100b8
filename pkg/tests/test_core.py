import math

import numpy as np
import pytest

from parcpt.core import (
    CandidateSet,
    DetectorConfig,
    InvalidConfigError,
    InvalidInputError,
    PenaltyRule,
    Segmentation,
    TimeSeries,
    default_overlap,
    resolve_penalty,
)


class TestTimeSeries:
    def test_univariate_coerced_to_column(self):
        y = TimeSeries([1.0, 2.0, 3.0])
        assert y.n == 3
        assert y.d == 1
        assert y.values.shape == (3, 1)

    def test_multivariate(self):
        y = TimeSeries([[0.0, 1.0], [2.0, 3.0]])
        assert (y.n, y.d) == (2, 2)

    def test_values_read_only(self):
        y = TimeSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            y.values[0] = 9.0

    @pytest.mark.parametrize(
        "bad",
        [[1.0], [], [1.0, np.nan], [1.0, np.inf], [[1.0, 2.0], [3.0]]],
    )
    def test_rejects_bad_input(self, bad):
        with pytest.raises(InvalidInputError):
            TimeSeries(bad)


class TestCandidateSet:
    def test_full(self):
        assert list(CandidateSet.full(5).indices) == [1, 2, 3, 4]

    @pytest.mark.parametrize("bad", [[0, 1], [2, 2], [3, 1], [1.5]])
    def test_rejects_bad_indices(self, bad):
        with pytest.raises(InvalidInputError):
            CandidateSet(bad)

    def test_bounds_check(self):
        CandidateSet([1, 4]).check_bounds(5)
        with pytest.raises(InvalidInputError):
            CandidateSet([1, 5]).check_bounds(5)


class TestSegmentation:
    def test_segments(self):
        seg = Segmentation(changepoints=(3, 7), penalised_cost=1.0, n=10)
        assert seg.segments() == [(1, 3), (4, 7), (8, 10)]
        assert seg.num_changepoints == 2

    @pytest.mark.parametrize("bad", [(0,), (10,), (4, 4), (5, 3)])
    def test_rejects_bad_changepoints(self, bad):
        with pytest.raises(InvalidInputError):
            Segmentation(changepoints=bad, penalised_cost=0.0, n=10)


class TestResolvePenalty:
    def test_univariate_n100(self):
        # 2 * ln 100
        beta = resolve_penalty(PenaltyRule(epsilon=0.0), 100)
        assert beta == pytest.approx(9.210340371976184, rel=1e-12)

    def test_univariate_smallest_interesting_n(self):
        assert resolve_penalty(PenaltyRule(epsilon=0.0), 3) == pytest.approx(
            2.1972245773362196, rel=1e-12
        )

    def test_multivariate(self):
        # (d+1)(1+eps) * ln n = 4 * 1.1 * ln 1000
        beta = resolve_penalty(PenaltyRule(epsilon=0.1, dimension=3), 1000)
        assert beta == pytest.approx(4.4 * math.log(1000), rel=1e-12)
        assert beta == pytest.approx(30.3941, abs=5e-5)

    def test_rejects_small_n(self):
        with pytest.raises(InvalidInputError):
            resolve_penalty(PenaltyRule(), 1)

    def test_positive_for_smallest_n(self):
        assert resolve_penalty(PenaltyRule(epsilon=0.0), 2) > 0

    def test_monotone_in_n_epsilon_dimension(self):
        ns = [2, 5, 10, 100, 10_000]
        betas = [resolve_penalty(PenaltyRule(epsilon=0.1, dimension=2), n) for n in ns]
        assert all(b < c for b, c in zip(betas, betas[1:]))
        eps = [0.0, 0.1, 0.5, 1.0]
        betas = [resolve_penalty(PenaltyRule(epsilon=e, dimension=3), 50) for e in eps]
        assert all(b < c for b, c in zip(betas, betas[1:]))
        dims = [2, 3, 5, 9]
        betas = [resolve_penalty(PenaltyRule(epsilon=0.1, dimension=d), 50) for d in dims]
        assert all(b < c for b, c in zip(betas, betas[1:]))
        # univariate (2+eps) sits above the d=1 reading of the multivariate rule
        assert resolve_penalty(PenaltyRule(epsilon=0.0), 50) == pytest.approx(
            2 * math.log(50)
        )

    def test_rule_validation(self):
        with pytest.raises(InvalidConfigError):
            PenaltyRule(epsilon=-0.1)
        with pytest.raises(InvalidConfigError):
            PenaltyRule(dimension=0)


class TestDefaultOverlap:
    def test_values(self):
        assert default_overlap(100) == math.ceil(math.log(100) ** 2) == 22
        assert default_overlap(100_000) == 133


class TestDetectorConfig:
    def test_defaults_resolve(self):
        cfg = DetectorConfig()
        assert cfg.method == "pelt"
        assert cfg.resolved_workers() >= 1
        assert cfg.resolved_overlap(100) == 22

    def test_explicit_beta_wins(self):
        y = TimeSeries(np.zeros(10))
        assert DetectorConfig(beta=3.5).resolved_beta(y) == 3.5

    def test_beta_from_rule_uses_data_dimension(self):
        y = TimeSeries(np.zeros((10, 3)))
        beta = DetectorConfig(penalty=PenaltyRule(epsilon=0.1, dimension=3)).resolved_beta(y)
        assert beta == pytest.approx(4.4 * math.log(10))
        # default rule adapts to the data
        assert DetectorConfig().resolved_beta(y) == pytest.approx(4 * 1.05 * math.log(10))

    def test_dimension_mismatch_rejected(self):
        y = TimeSeries(np.zeros((10, 2)))
        with pytest.raises(InvalidConfigError):
            DetectorConfig(penalty=PenaltyRule(dimension=1)).resolved_beta(y)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"method": "wbs"},
            {"workers": 0},
            {"overlap": -1},
            {"beta": 0.0},
            {"min_segment_length": 0},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(InvalidConfigError):
            DetectorConfig(**kwargs)

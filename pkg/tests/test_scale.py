"""Robust location and scale estimators."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robcov.scale import (
    MADE,
    QN,
    SD,
    TAU,
    QN_CONSISTENCY,
    median,
    robust_location,
    robust_scale,
)

ALL_ESTIMATORS = [MADE, QN, TAU, SD]


class TestMedian:
    def test_odd(self):
        assert median([1, 2, 3]) == 2

    def test_even(self):
        assert median([1, 2, 3, 4]) == 2.5

    def test_s1_qc_column(self, s1):
        # frozen from a sort-based oracle over the 25 QC values
        assert median(s1.column("QC")) == pytest.approx(7.8533, abs=1e-10)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            median([])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            median([1.0, np.nan])


class TestRobustScale:
    def test_made_hand_computed(self):
        # |x - 3| = [2, 1, 0, 1, 7], MAD = 1
        assert robust_scale(MADE, [1, 2, 3, 4, 10]) == pytest.approx(1.4826)

    @pytest.mark.parametrize("est", ALL_ESTIMATORS)
    def test_constant_vector_gives_zero(self, est):
        assert robust_scale(est, [5.0] * 8) == 0.0

    def test_classical_sd(self):
        x = [2, 4, 4, 4, 5, 5, 7, 9]
        assert robust_scale(SD, x) == pytest.approx(2.138, abs=1e-3)

    def test_qn_hand_computed(self):
        # pairwise |diffs| of [1,2,4,8,16] sorted: 1,2,3,4,6,7,8,12,14,15
        # h = 3, k = C(3,2) = 3 -> third smallest = 3; n=5 correction 0.844
        x = [1.0, 2.0, 4.0, 8.0, 16.0]
        assert robust_scale(QN, x) == pytest.approx(QN_CONSISTENCY * 0.844 * 3)

    def test_singleton_rejected(self):
        with pytest.raises(ValueError):
            robust_scale(MADE, [1.0])

    def test_qn_and_made_agree_on_normal(self):
        rng = np.random.default_rng(99)
        x = rng.standard_normal(1000)
        q = robust_scale(QN, x)
        m = robust_scale(MADE, x)
        assert abs(q - m) / m < 0.15

    @pytest.mark.parametrize("est", ALL_ESTIMATORS)
    def test_consistency_at_the_normal(self, est):
        # all four scales estimate sigma for large normal samples
        rng = np.random.default_rng(123)
        x = 3.0 * rng.standard_normal(4000)
        assert robust_scale(est, x) == pytest.approx(3.0, rel=0.08)


class TestRobustLocation:
    def test_made_is_median(self):
        assert robust_location(MADE, [1, 2, 3]) == 2

    def test_sd_is_mean(self):
        assert robust_location(SD, [1, 2, 3, 4]) == 2.5

    def test_tau_symmetric_vector(self):
        assert robust_location(TAU, [-2, -1, 0, 1, 2]) == pytest.approx(0.0)

    def test_tau_resists_an_outlier(self):
        x = np.array([1.0, 1.1, 0.9, 1.05, 0.95, 50.0])
        assert abs(robust_location(TAU, x) - 1.0) < 0.1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            robust_location(QN, [])


class TestEquivariance:
    @settings(max_examples=40, deadline=None)
    @given(
        a=st.floats(min_value=0.01, max_value=100.0),
        b=st.floats(min_value=-1e4, max_value=1e4),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_affine_equivariance(self, a, b, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(17) * 5.0 + 1.0
        for est in ALL_ESTIMATORS:
            loc = robust_location(est, x)
            sc = robust_scale(est, x)
            loc2 = robust_location(est, a * x + b)
            sc2 = robust_scale(est, a * x + b)
            assert loc2 == pytest.approx(a * loc + b, rel=1e-10, abs=1e-8)
            assert sc2 == pytest.approx(a * sc, rel=1e-10, abs=1e-10)

    def test_scale_sign_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(20)
        for est in ALL_ESTIMATORS:
            assert robust_scale(est, -x) == pytest.approx(
                robust_scale(est, x), rel=1e-12
            )


class TestBreakdown:
    def test_half_contamination_smoke(self):
        rng = np.random.default_rng(2024)
        clean = rng.standard_normal(25) * 2.0 + 10.0
        made0 = robust_scale(MADE, clean)
        qn0 = robust_scale(QN, clean)
        bad = clean.copy()
        bad[: (25 - 1) // 2] = 1e12
        assert robust_scale(MADE, bad) < 10 * made0
        assert robust_scale(QN, bad) < 10 * qn0
        assert robust_scale(SD, bad) > 1e10

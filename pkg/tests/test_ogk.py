"""Orthogonalized GK estimator: paper values, positive definiteness, robustness."""

from __future__ import annotations

import numpy as np
import pytest

from robcov.dataset import DataMatrix
from robcov.errors import DataError, EstimatorError
from robcov.numerics import is_positive_definite
from robcov.ogk import cov_ogk, ogk_distances
from robcov.outlier import mahalanobis_sq
from robcov.pairwise import pairwise_matrix
from robcov.scale import MADE, QN, SD, TAU, robust_scale


def _matrix(rng, n, p, contaminate=False):
    x = rng.standard_normal((n, p))
    if contaminate:
        bad = max(1, n // 10)
        x[:bad] += 50.0
    return DataMatrix(
        tuple(f"r{i}" for i in range(n)),
        tuple(f"c{j}" for j in range(p)),
        x,
    )


def implied_correlation(est):
    v = est.matrix
    return v[0, 1] / np.sqrt(v[0, 0] * v[1, 1])


class TestPaperValues:
    def test_s1_implied_correlation(self, s1):
        est = cov_ogk(s1)
        assert implied_correlation(est) == pytest.approx(0.81, abs=0.02)

    def test_s2_lab9_has_max_distance(self, s2):
        d2 = ogk_distances(s2)
        assert s2.row_ids[int(np.argmax(d2))] == "Lab9"


class TestAlgorithm:
    def test_single_column_equals_squared_scale(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((12, 1)) * 3.0 + 5.0
        m = DataMatrix(tuple(f"r{i}" for i in range(12)), ("v",), x)
        est = cov_ogk(m, TAU, reweight=False)
        s = robust_scale(TAU, x[:, 0])
        assert est.matrix[0, 0] == pytest.approx(s * s, rel=1e-10)

    def test_uncorrelated_data_stays_uncorrelated(self):
        # population correlation 0; five independent draws keep the bound
        # meaningful without being hostage to a single tail draw
        for seed in range(5):
            rng = np.random.default_rng(seed)
            m = _matrix(rng, 500, 2)
            est = cov_ogk(m)
            assert abs(implied_correlation(est)) < 0.15

    def test_distances_match_eq11_oracle(self, s2):
        raw = cov_ogk(s2, reweight=False)
        d2 = ogk_distances(s2)
        for i in range(s2.n):
            direct = mahalanobis_sq(s2.values[i], raw.location, raw.matrix)
            assert d2[i] == pytest.approx(direct, rel=1e-8, abs=1e-8)

    def test_distance_zero_at_location(self, s1):
        raw = cov_ogk(s1, reweight=False)
        assert mahalanobis_sq(raw.location, raw.location, raw.matrix) == 0.0

    def test_reweighted_variant(self, s1):
        est = cov_ogk(s1, reweight=True)
        assert est.estimator_tag.endswith("+reweighted")
        assert est.positive_definite

    def test_permutation_invariance(self, s1):
        est = cov_ogk(s1)
        rng = np.random.default_rng(9)
        perm = rng.permutation(s1.n)
        shuffled = DataMatrix(
            tuple(s1.row_ids[i] for i in perm), s1.col_ids, s1.values[perm]
        )
        est2 = cov_ogk(shuffled)
        assert np.allclose(est.matrix, est2.matrix, atol=1e-10)
        assert np.allclose(est.location, est2.location, atol=1e-10)

    def test_column_scaling_equivariance(self, s1):
        a = 7.5
        scaled = DataMatrix(
            s1.row_ids, s1.col_ids, s1.values * np.array([a, 1.0])
        )
        est = cov_ogk(s1)
        est2 = cov_ogk(scaled)
        assert est2.matrix[0, 0] == pytest.approx(est.matrix[0, 0] * a * a, rel=1e-8)
        assert est2.matrix[0, 1] == pytest.approx(est.matrix[0, 1] * a, rel=1e-8)
        assert est2.matrix[1, 1] == pytest.approx(est.matrix[1, 1], rel=1e-8)


class TestPositiveDefiniteness:
    def test_200_random_datasets(self):
        # includes contaminated draws; criterion is Cholesky success
        rng = np.random.default_rng(2718)
        for trial in range(200):
            n = int(rng.integers(10, 61))
            p = int(rng.integers(2, 7))
            if n <= p:
                n = p + 2
            m = _matrix(rng, n, p, contaminate=trial % 10 == 0)
            est = cov_ogk(m)
            assert est.positive_definite
            assert is_positive_definite(est.matrix)


class TestBreakdown:
    def test_contamination_barely_moves_correlation(self):
        rng = np.random.default_rng(31)
        z = rng.standard_normal((25, 2))
        x = np.column_stack([z[:, 0], 0.8 * z[:, 0] + 0.6 * z[:, 1]])
        clean = DataMatrix(
            tuple(f"r{i}" for i in range(25)), ("a", "b"), x
        )
        rho_clean = implied_correlation(cov_ogk(clean))
        bad = x.copy()
        bad[:5] = 1e9
        dirty = DataMatrix(clean.row_ids, clean.col_ids, bad)
        rho_dirty = implied_correlation(cov_ogk(dirty))
        assert abs(rho_dirty - rho_clean) < 0.2
        classical = pairwise_matrix("classical", SD, dirty)
        assert implied_correlation(classical) == pytest.approx(1.0, abs=1e-6)


class TestErrors:
    def test_too_few_rows(self):
        m = DataMatrix(("a", "b"), ("u", "v"), np.array([[1.0, 2.0], [3.0, 4.0]]))
        with pytest.raises(DataError):
            cov_ogk(m)

    def test_missing_cells(self, s2_raw):
        with pytest.raises(DataError):
            cov_ogk(s2_raw)

    def test_zero_scale_column(self):
        m = DataMatrix(
            tuple(f"r{i}" for i in range(6)),
            ("u", "v"),
            np.column_stack([np.ones(6), np.arange(6.0)]),
        )
        with pytest.raises(EstimatorError):
            cov_ogk(m, MADE)

    @pytest.mark.parametrize("est", [MADE, QN, TAU])
    def test_scale_kinds_all_run(self, s1, est):
        result = cov_ogk(s1, est)
        assert result.positive_definite

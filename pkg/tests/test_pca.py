"""Classical and robust PCA: eigenstructure, scores, biplot data."""

from __future__ import annotations

import numpy as np
import pytest

from robcov.dataset import DataMatrix
from robcov.errors import DataError, EstimatorError
from robcov.pairwise import CovarianceEstimate, pairwise_matrix
from robcov.pca import biplot_data, pca_fit, robust_column_standardization
from robcov.scale import SD


def _estimate(location, matrix, tag="test", n_used=10):
    return CovarianceEstimate(
        location=np.asarray(location, dtype=float),
        matrix=np.asarray(matrix, dtype=float),
        estimator_tag=tag,
        n_used=n_used,
        positive_definite=True,
    )


def _dm(x):
    n, p = x.shape
    return DataMatrix(
        tuple(f"r{i}" for i in range(n)), tuple(f"c{j}" for j in range(p)), x
    )


class TestPcaFit:
    def test_diagonal_covariance(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((20, 2)) * np.array([2.0, 1.0])
        m = _dm(x)
        est = _estimate(x.mean(axis=0), np.diag([4.0, 1.0]))
        model = pca_fit(m, est, use_correlation=False)
        assert np.allclose(model.eigenvalues, [4.0, 1.0])
        assert np.allclose(np.abs(model.loadings[:, 0]), [1.0, 0.0], atol=1e-12)

    def test_correlation_mode_trace_is_p(self, s2, classical_s2):
        model = pca_fit(s2, classical_s2, use_correlation=True)
        assert model.eigenvalues.sum() == pytest.approx(8.0, abs=1e-9)

    def test_classical_score_covariance_is_diagonal(self, s2, classical_s2):
        for use_corr in (False, True):
            model = pca_fit(s2, classical_s2, use_correlation=use_corr)
            got = np.cov(model.scores, rowvar=False, ddof=1)
            assert np.allclose(
                got, np.diag(model.eigenvalues), atol=1e-8
            )

    def test_reconstruction(self, s2, classical_s2, mcd_s2):
        for est in (classical_s2, mcd_s2.estimate):
            model = pca_fit(s2, est, use_correlation=True)
            rebuilt = (
                model.loadings @ np.diag(model.eigenvalues) @ model.loadings.T
            )
            d = np.sqrt(np.diag(est.matrix))
            target = est.matrix / np.outer(d, d)
            rel = np.linalg.norm(rebuilt - target) / np.linalg.norm(target)
            assert rel < 1e-8

    def test_mcd_lab9_largest_norm(self, s2, mcd_s2):
        model = pca_fit(s2, mcd_s2.estimate, use_correlation=True)
        norms = model.score_norms()
        assert s2.row_ids[int(np.argmax(norms))] == "Lab9"

    def test_robust_standardization_pipeline(self, s2, mcd_s2):
        center, col_scale = robust_column_standardization(s2)
        model = pca_fit(
            s2, mcd_s2.estimate, use_correlation=True, center=center, scale=col_scale
        )
        norms = model.score_norms()
        top4 = {s2.row_ids[i] for i in np.argsort(norms)[::-1][:4]}
        assert s2.row_ids[int(np.argmax(norms))] == "Lab9"
        assert {"Lab23", "Lab28"} <= top4

    def test_scores_match_definition(self, s2, classical_s2):
        model = pca_fit(s2, classical_s2, use_correlation=True)
        expected = ((s2.values - model.center) / model.scale) @ model.loadings
        assert np.allclose(model.scores, expected, atol=1e-12)

    def test_robust_vs_classical_spread(self, s2, classical_s2, mcd_s2):
        classical = pca_fit(s2, classical_s2, use_correlation=True)
        center, col_scale = robust_column_standardization(s2)
        robust = pca_fit(
            s2, mcd_s2.estimate, use_correlation=True, center=center, scale=col_scale
        )
        c_norms = classical.score_norms()
        r_norms = robust.score_norms()
        assert (r_norms.max() / np.median(r_norms)) > (
            c_norms.max() / np.median(c_norms)
        )

    def test_missing_cells_rejected(self, s2_raw, classical_s2):
        with pytest.raises(DataError):
            pca_fit(s2_raw, classical_s2)

    def test_zero_diagonal_rejected(self):
        x = np.random.default_rng(1).standard_normal((8, 2))
        m = _dm(x)
        est = _estimate([0.0, 0.0], np.diag([1.0, 0.0]))
        with pytest.raises(EstimatorError):
            pca_fit(m, est, use_correlation=True)

    def test_indefinite_estimate_rejected(self):
        x = np.random.default_rng(1).standard_normal((8, 2))
        m = _dm(x)
        est = _estimate([0.0, 0.0], np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(EstimatorError, match="indefinite"):
            pca_fit(m, est, use_correlation=False)

    def test_eigenvalues_descending_nonnegative(self, s2, mcd_s2):
        model = pca_fit(s2, mcd_s2.estimate, use_correlation=True)
        assert np.all(np.diff(model.eigenvalues) <= 1e-12)
        assert np.all(model.eigenvalues >= 0)


class TestBiplotData:
    def test_identity_model_arrows_are_axes(self):
        x = np.random.default_rng(2).standard_normal((10, 2))
        m = _dm(x)
        est = _estimate([0.0, 0.0], np.eye(2))
        model = pca_fit(m, est, use_correlation=False)
        _, arrows, labels = biplot_data(model, 0, 1)
        assert np.allclose(np.abs(arrows), np.eye(2), atol=1e-12)
        assert labels == ("c0", "c1")

    def test_s2_classical_lab23_extreme(self, s2, classical_s2):
        model = pca_fit(s2, classical_s2, use_correlation=True)
        points, arrows, labels = biplot_data(model, 0, 1)
        norms = np.hypot(points[:, 0], points[:, 1])
        top2 = {s2.row_ids[i] for i in np.argsort(norms)[::-1][:2]}
        assert "Lab23" in top2
        assert arrows.shape == (8, 2)
        assert labels == s2.col_ids

    def test_arrows_scaled_by_sqrt_eigenvalue(self, s2, classical_s2):
        model = pca_fit(s2, classical_s2, use_correlation=True)
        _, arrows, _ = biplot_data(model, 0, 1)
        expected = model.loadings[:, (0, 1)] * np.sqrt(model.eigenvalues[[0, 1]])
        assert np.allclose(arrows, expected, atol=1e-12)

    def test_bad_indices(self, s2, classical_s2):
        model = pca_fit(s2, classical_s2, use_correlation=True)
        with pytest.raises(ValueError):
            biplot_data(model, 1, 1)
        with pytest.raises(ValueError):
            biplot_data(model, 0, 99)

"""Eigendecomposition, SPD determinant/inverse, and distribution quantiles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robcov.errors import EstimatorError
from robcov.numerics import (
    as_symmetric,
    chisq_cdf,
    chisq_quantile,
    det_and_inverse,
    eigen_sym,
    f_cdf,
    f_quantile,
    is_positive_definite,
)

import oracles


def random_spd(rng: np.random.Generator, p: int) -> np.ndarray:
    a = rng.standard_normal((p, p))
    return a @ a.T + p * np.eye(p)


class TestEigenSym:
    def test_identity(self):
        dec = eigen_sym(np.eye(3))
        assert np.allclose(dec.values, [1, 1, 1])

    def test_diagonal(self):
        dec = eigen_sym(np.diag([4.0, 1.0]))
        assert np.allclose(dec.values, [4.0, 1.0])
        assert np.allclose(np.abs(dec.vectors), np.eye(2), atol=1e-12)

    def test_two_by_two_hand_solved(self):
        # [[2,1],[1,2]] has eigenpairs (3, [1,1]/sqrt2) and (1, [1,-1]/sqrt2)
        dec = eigen_sym(np.array([[2.0, 1.0], [1.0, 2.0]]))
        s = 1 / math.sqrt(2)
        assert np.allclose(dec.values, [3.0, 1.0], atol=1e-12)
        assert np.allclose(dec.vectors[:, 0], [s, s], atol=1e-12)
        assert np.allclose(dec.vectors[:, 1], [s, -s], atol=1e-12)

    def test_invariants_random(self):
        rng = np.random.default_rng(42)
        for p in (1, 2, 3, 5, 8, 13):
            m = random_spd(rng, p)
            dec = eigen_sym(m)
            assert np.all(np.diff(dec.values) <= 1e-12)
            assert np.max(np.abs(dec.vectors.T @ dec.vectors - np.eye(p))) < 1e-10
            rebuilt = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
            rel = np.linalg.norm(rebuilt - m) / np.linalg.norm(m)
            assert rel < 1e-8
            # trace and determinant identities
            assert math.isclose(dec.values.sum(), np.trace(m), rel_tol=1e-9)
            det, _ = det_and_inverse(m)
            assert math.isclose(np.prod(dec.values), det, rel_tol=1e-8)

    def test_sign_convention(self):
        rng = np.random.default_rng(7)
        m = random_spd(rng, 6)
        dec = eigen_sym(m)
        for j in range(6):
            k = int(np.argmax(np.abs(dec.vectors[:, j])))
            assert dec.vectors[k, j] > 0

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eigen_sym(np.array([[1.0, np.nan], [np.nan, 1.0]]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            as_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestDetAndInverse:
    def test_identity(self):
        det, inv = det_and_inverse(np.eye(4))
        assert det == pytest.approx(1.0)
        assert np.allclose(inv, np.eye(4))

    def test_diagonal(self):
        det, inv = det_and_inverse(np.diag([2.0, 8.0]))
        assert det == pytest.approx(16.0)
        assert np.allclose(inv, np.diag([0.5, 0.125]))

    def test_random_spd_vs_cofactor_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = random_spd(rng, 4)
            det, inv = det_and_inverse(m)
            assert det == pytest.approx(oracles.cofactor_det(m), rel=1e-9)
            assert np.max(np.abs(m @ inv - np.eye(4))) < 1e-8

    def test_not_positive_definite(self):
        with pytest.raises(EstimatorError):
            det_and_inverse(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert not is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert is_positive_definite(np.eye(3))


class TestChiSquare:
    @pytest.mark.parametrize(
        "prob,df,expected,tol",
        [
            (0.95, 2, 5.991, 0.001),
            (0.99, 8, 20.090, 0.001),
            (0.5, 2, 2 * math.log(2), 0.0005),
        ],
    )
    def test_frozen_values(self, prob, df, expected, tol):
        assert chisq_quantile(prob, df) == pytest.approx(expected, abs=tol)

    def test_against_scipy_oracle(self):
        for prob in (0.01, 0.05, 0.5, 0.9, 0.975, 0.999):
            for df in (1, 2, 5, 8, 20):
                ours = chisq_quantile(prob, df)
                ref = oracles.chisq_quantile_oracle(prob, df)
                assert ours == pytest.approx(ref, rel=1e-9, abs=1e-9)
                assert chisq_cdf(ours, df) == pytest.approx(prob, abs=1e-8)

    def test_monotone_in_prob(self):
        qs = [chisq_quantile(p, 4) for p in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99)]
        assert all(a < b for a, b in zip(qs, qs[1:]))

    @pytest.mark.parametrize("prob", [0.0, 1.0, -0.2, 1.5])
    def test_domain_errors(self, prob):
        with pytest.raises(ValueError):
            chisq_quantile(prob, 2)


class TestFDistribution:
    @pytest.mark.parametrize(
        "prob,df1,df2,expected,tol",
        [
            (0.95, 2, 24, 3.403, 0.002),
            (0.99, 2, 24, 5.614, 0.003),
            (0.5, 2, 2, 1.0, 1e-9),
        ],
    )
    def test_frozen_values(self, prob, df1, df2, expected, tol):
        assert f_quantile(prob, df1, df2) == pytest.approx(expected, abs=tol)

    def test_against_scipy_oracle(self):
        for prob in (0.05, 0.5, 0.95, 0.99):
            for df1, df2 in ((1, 10), (2, 24), (8, 21), (5, 5)):
                ours = f_quantile(prob, df1, df2)
                ref = oracles.f_quantile_oracle(prob, df1, df2)
                assert ours == pytest.approx(ref, rel=1e-8, abs=1e-9)
                assert f_cdf(ours, df1, df2) == pytest.approx(prob, abs=1e-8)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            f_quantile(0.0, 2, 24)
        with pytest.raises(ValueError):
            f_quantile(0.95, 0, 24)


class TestRoundTrips:
    @pytest.mark.parametrize("prob", [0.01, 0.05, 0.5, 0.95, 0.99])
    @pytest.mark.parametrize("df", [1, 2, 8, 25])
    def test_chisq_round_trip(self, prob, df):
        assert chisq_cdf(chisq_quantile(prob, df), df) == pytest.approx(
            prob, abs=1e-7
        )

    @pytest.mark.parametrize("prob", [0.01, 0.05, 0.5, 0.95, 0.99])
    def test_f_round_trip(self, prob):
        assert f_cdf(f_quantile(prob, 2, 24), 2, 24) == pytest.approx(
            prob, abs=1e-7
        )

    @settings(max_examples=60, deadline=None)
    @given(
        prob=st.floats(min_value=0.001, max_value=0.999),
        df=st.integers(min_value=1, max_value=30),
    )
    def test_chisq_round_trip_property(self, prob, df):
        assert chisq_cdf(chisq_quantile(prob, df), df) == pytest.approx(
            prob, abs=1e-7
        )

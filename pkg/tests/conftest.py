"""Shared fixtures. The expensive estimates are session-scoped."""

from __future__ import annotations

import pytest

from robcov import cov_mcd, cov_ogk, fixture, impute_median, pairwise_matrix
from robcov.scale import SD


@pytest.fixture(scope="session")
def s1():
    return fixture("potassium")


@pytest.fixture(scope="session")
def s2_raw():
    return fixture("eight_elements")


@pytest.fixture(scope="session")
def s2(s2_raw):
    imputed, _ = impute_median(s2_raw)
    return imputed


@pytest.fixture(scope="session")
def mcd_s1(s1):
    # exhaustive search over C(25, 14) subsets; by far the slowest fixture
    return cov_mcd(s1)


@pytest.fixture(scope="session")
def mcd_s2(s2):
    return cov_mcd(s2)


@pytest.fixture(scope="session")
def ogk_s2(s2):
    return cov_ogk(s2)


@pytest.fixture(scope="session")
def classical_s2(s2):
    return pairwise_matrix("classical", SD, s2)

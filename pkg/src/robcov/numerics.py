"""Small dense symmetric linear algebra and distribution quantiles.

Everything here operates on plain float64 numpy arrays. Symmetric matrices
are validated (and exactly symmetrized) at the boundary with
:func:`as_symmetric`; downstream code can then rely on ``m[i, j] == m[j, i]``
holding bit-for-bit.

The chi-square and F quantiles are computed by bisection on local
implementations of the regularized incomplete gamma and beta functions, so
the library carries no distribution-table dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimatorError

__all__ = [
    "EigenDecomposition",
    "as_symmetric",
    "eigen_sym",
    "det_and_inverse",
    "is_positive_definite",
    "chisq_cdf",
    "chisq_quantile",
    "f_cdf",
    "f_quantile",
]


def as_symmetric(m: np.ndarray) -> np.ndarray:
    """Validate a square matrix and return an exactly symmetric float64 copy.

    Raises ValueError for non-square or non-finite input, or when the input
    is not symmetric to within 1e-8 (absolute, relative to the largest
    element).
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric")
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def eigen_sym(m: np.ndarray) -> EigenDecomposition:
    """Symmetric eigendecomposition with a deterministic sign convention.

    Eigenvalues are returned in descending order. Each eigenvector is
    oriented so that its largest-magnitude component is positive, which
    keeps golden-file outputs stable across runs.
    """
    a = as_symmetric(m)
    values, vectors = np.linalg.eigh(a)
    # eigh returns ascending order
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    for j in range(vectors.shape[1]):
        k = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[k, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return EigenDecomposition(values=values, vectors=vectors)


def is_positive_definite(m: np.ndarray) -> bool:
    """True iff the symmetric matrix admits a Cholesky factorization."""
    try:
        np.linalg.cholesky(as_symmetric(m))
    except np.linalg.LinAlgError:
        return False
    return True


def det_and_inverse(m: np.ndarray) -> tuple[float, np.ndarray]:
    """Determinant and inverse of a symmetric positive definite matrix.

    Both are derived from the Cholesky factor; a factorization failure
    signals a singular (or indefinite) covariance and raises
    EstimatorError.
    """
    a = as_symmetric(m)
    try:
        lo = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise EstimatorError(
            "matrix is not positive definite (singular covariance?)"
        ) from exc
    det = float(np.prod(np.diag(lo)) ** 2)
    lo_inv = np.linalg.inv(lo)
    inv = lo_inv.T @ lo_inv
    return det, (inv + inv.T) / 2.0


# ---------------------------------------------------------------------------
# Regularized incomplete gamma / beta and the quantiles built on them
# ---------------------------------------------------------------------------

_TINY = 1e-300
_EPS = 1e-16


def _gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0:
        raise ValueError("shape parameter must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    log_front = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        # series expansion converges quickly on this side
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(1000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return min(1.0, total * math.exp(log_front))
    # continued fraction for Q(a, x), modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return max(0.0, 1.0 - math.exp(log_front) * h)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _beta_inc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _check_prob(prob: float) -> None:
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must lie strictly in (0, 1), got {prob}")


def _bisect_cdf(cdf, prob: float, hi: float) -> float:
    """Invert a monotone CDF on [0, inf) by bracket expansion + bisection."""
    lo = 0.0
    for _ in range(200):
        if cdf(hi) >= prob:
            break
        lo = hi
        hi *= 2.0
    else:
        raise EstimatorError("failed to bracket quantile")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < prob:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def chisq_cdf(x: float, df: int) -> float:
    """CDF of the chi-square distribution with df degrees of freedom."""
    if df < 1:
        raise ValueError("degrees of freedom must be a positive integer")
    if x <= 0:
        return 0.0
    return _gamma_p(df / 2.0, x / 2.0)


def chisq_quantile(prob: float, df: int) -> float:
    """Quantile of the chi-square distribution with df degrees of freedom."""
    _check_prob(prob)
    if df < 1:
        raise ValueError("degrees of freedom must be a positive integer")
    hi = df + 10.0 * math.sqrt(2.0 * df) + 10.0
    return _bisect_cdf(lambda q: chisq_cdf(q, df), prob, hi)


def f_cdf(x: float, df1: int, df2: int) -> float:
    """CDF of the F distribution with (df1, df2) degrees of freedom."""
    if df1 < 1 or df2 < 1:
        raise ValueError("degrees of freedom must be positive integers")
    if x <= 0:
        return 0.0
    return _beta_inc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))


def f_quantile(prob: float, df1: int, df2: int) -> float:
    """Quantile of the F distribution with (df1, df2) degrees of freedom."""
    _check_prob(prob)
    if df1 < 1 or df2 < 1:
        raise ValueError("degrees of freedom must be positive integers")
    return _bisect_cdf(lambda q: f_cdf(q, df1, df2), prob, 10.0)

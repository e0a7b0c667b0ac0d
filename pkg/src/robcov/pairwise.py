"""Pairwise covariance and correlation estimators, classical and robust.

Covers the classical moment estimators, Spearman and Kendall rank
correlation, the Gnanadesikan-Kettenring difference-of-variances covariance
(cov_gk), its bounded correlation variant (cor_gk), and the covariance
rebuilt from it (cov_rgk). :func:`pairwise_matrix` assembles any of these
into a full p x p estimate.

cov_gk is the one estimator here that can produce |cov| greater than the
product of the marginal scales, so matrices assembled from it (and from the
other pairwise-robust kinds) are not guaranteed positive definite; the
assembled estimate carries an explicit ``positive_definite`` flag instead
of any silent repair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataMatrix
from .errors import DataError, EstimatorError
from .numerics import is_positive_definite
from .scale import ScaleEstimator, ScaleKind, robust_location, robust_scale

__all__ = [
    "CovarianceEstimate",
    "cov_classical",
    "pearson_r",
    "spearman_rho",
    "kendall_tau",
    "cov_rank",
    "cov_gk",
    "cor_gk",
    "cov_rgk",
    "pairwise_matrix",
    "MATRIX_KINDS",
]

MATRIX_KINDS = ("classical", "rank", "gk", "rgk")

# rounding slack tolerated when clamping correlations to [-1, 1]
_CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class CovarianceEstimate:
    """A p x p covariance matrix with its paired location estimate.

    ``n_used`` is the number of data rows that fed the estimator (all of
    them, for estimators that internally subset or reweight).
    ``positive_definite`` records the result of a Cholesky check; pairwise
    robust estimators can legitimately be indefinite.
    """

    location: np.ndarray
    matrix: np.ndarray
    estimator_tag: str
    n_used: int
    positive_definite: bool

    def __post_init__(self) -> None:
        loc = np.asarray(self.location, dtype=float)
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"matrix must be square, got shape {mat.shape}")
        if loc.shape != (mat.shape[0],):
            raise ValueError("location length must match matrix dimension")
        if np.any(np.diag(mat) < 0):
            raise ValueError("diagonal entries must be nonnegative")
        mat = (mat + mat.T) / 2.0
        loc = loc.copy()
        loc.setflags(write=False)
        mat.setflags(write=False)
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "matrix", mat)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]

    def correlation(self) -> np.ndarray:
        """Rescale to a correlation matrix (unit diagonal)."""
        d = np.sqrt(np.diag(self.matrix))
        if np.any(d <= 0):
            raise EstimatorError("zero variance on the diagonal")
        return self.matrix / np.outer(d, d)


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=float).ravel()
    b = np.asarray(y, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("inputs contain non-finite entries")
    return a, b


def _clamp_correlation(r: float) -> float:
    if abs(r) > 1.0 + _CLAMP_EPS:
        raise EstimatorError(f"correlation {r} outside [-1, 1] beyond rounding")
    return min(1.0, max(-1.0, r))


def cov_classical(x, y) -> float:
    """Classical sample covariance with the n-1 divisor."""
    a, b = _pair(x, y)
    if a.size < 2:
        raise ValueError("need at least 2 observations")
    return float((a - a.mean()) @ (b - b.mean()) / (a.size - 1))


def pearson_r(x, y) -> float:
    """Pearson correlation; rejects inputs with zero standard deviation."""
    a, b = _pair(x, y)
    if a.size < 2:
        raise ValueError("need at least 2 observations")
    sx = float(np.std(a, ddof=1))
    sy = float(np.std(b, ddof=1))
    if sx == 0.0 or sy == 0.0:
        raise EstimatorError("zero standard deviation")
    return _clamp_correlation(cov_classical(a, b) / (sx * sy))


def _average_ranks(a: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing the average of their rank positions."""
    order = np.argsort(a, kind="stable")
    ranks = np.empty(a.size, dtype=float)
    sorted_vals = a[order]
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Spearman rank correlation (Pearson r of average ranks)."""
    a, b = _pair(x, y)
    if a.size < 3:
        raise ValueError("need at least 3 observations")
    return pearson_r(_average_ranks(a), _average_ranks(b))


def kendall_tau(x, y) -> float:
    """Kendall tau with tied pairs excluded from the count.

    A pair of points is concordant when both coordinate differences have
    the same sign, discordant when opposite; pairs tied in either
    coordinate are not counted at all, and the denominator is Nc + Nd.
    """
    a, b = _pair(x, y)
    n = a.size
    if n < 3:
        raise ValueError("need at least 3 observations")
    dx = np.sign(a[:, None] - a[None, :])
    dy = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(n, k=1)
    prod = dx[iu] * dy[iu]
    nc = int(np.sum(prod > 0))
    nd = int(np.sum(prod < 0))
    if nc + nd == 0:
        raise EstimatorError("all pairs are tied; tau is undefined")
    return _clamp_correlation((nc - nd) / (nc + nd))


def cov_rank(method: str, est: ScaleEstimator, x, y) -> float:
    """Rank correlation rescaled by the product of robust scales."""
    a, b = _pair(x, y)
    if method == "spearman":
        r = spearman_rho(a, b)
    elif method == "kendall":
        r = kendall_tau(a, b)
    else:
        raise ValueError(f"unknown rank method {method!r}")
    sx = robust_scale(est, a)
    sy = robust_scale(est, b)
    if sx == 0.0 or sy == 0.0:
        raise EstimatorError("zero robust scale")
    return r * sx * sy


def cov_gk(est: ScaleEstimator, x, y) -> float:
    """Gnanadesikan-Kettenring covariance from scales of the sum and difference.

    With the classical standard deviation this reduces algebraically to the
    classical covariance; with a robust scale it inherits that scale's
    breakdown, at the cost of no admissibility guarantee.
    """
    a, b = _pair(x, y)
    s1 = robust_scale(est, a + b)
    s2 = robust_scale(est, a - b)
    return (s1**2 - s2**2) / 4.0


def cor_gk(est: ScaleEstimator, x, y) -> float:
    """Bounded GK correlation from scales of the standardized sum/difference.

    Being a difference of nonnegative quantities over their sum, the result
    is always admissible (in [-1, 1]).
    """
    a, b = _pair(x, y)
    sx = robust_scale(est, a)
    sy = robust_scale(est, b)
    if sx == 0.0 or sy == 0.0:
        raise EstimatorError("zero robust scale")
    zx = a / sx
    zy = b / sy
    splus = robust_scale(est, zx + zy)
    sminus = robust_scale(est, zx - zy)
    denom = splus**2 + sminus**2
    if denom == 0.0:
        raise EstimatorError("both transformed scales are zero")
    return (splus**2 - sminus**2) / denom


def cov_rgk(est: ScaleEstimator, x, y) -> float:
    """Covariance rebuilt from cor_gk and the original marginal scales."""
    a, b = _pair(x, y)
    sx = robust_scale(est, a)
    sy = robust_scale(est, b)
    if sx == 0.0 or sy == 0.0:
        raise EstimatorError("zero robust scale")
    return cor_gk(est, a, b) * sx * sy


def pairwise_matrix(
    kind: str,
    est: ScaleEstimator,
    m: DataMatrix,
    rank_method: str = "spearman",
) -> CovarianceEstimate:
    """Assemble a full covariance estimate by pairwise application.

    ``kind`` selects the off-diagonal estimator: ``classical`` (Eq.-1
    moments, est is ignored), ``rank`` (rank correlation times robust
    scales), ``gk``, or ``rgk``. Diagonals are the squared (robust) scales;
    the location is each column's paired location estimate.
    """
    if kind not in MATRIX_KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {MATRIX_KINDS}")
    if m.n_missing:
        raise DataError(
            f"input has {m.n_missing} missing cells; impute before estimating"
        )
    if m.n < 3:
        raise DataError("need at least 3 rows")
    x = m.values
    p = m.p

    if kind == "classical":
        location = x.mean(axis=0)
        matrix = np.cov(x, rowvar=False, ddof=1).reshape(p, p)
        tag = "classical"
    else:
        scales = np.empty(p)
        for j in range(p):
            scales[j] = robust_scale(est, x[:, j])
            if scales[j] == 0.0:
                raise EstimatorError(
                    f"column {m.col_ids[j]!r} has zero robust scale"
                )
        location = np.array([robust_location(est, x[:, j]) for j in range(p)])
        matrix = np.diag(scales**2)
        for j in range(p):
            for k in range(j + 1, p):
                if kind == "rank":
                    v = cov_rank(rank_method, est, x[:, j], x[:, k])
                elif kind == "gk":
                    v = cov_gk(est, x[:, j], x[:, k])
                else:
                    v = cov_rgk(est, x[:, j], x[:, k])
                matrix[j, k] = matrix[k, j] = v
        tag = f"rank_{rank_method}+{est.kind.value}" if kind == "rank" else (
            f"{kind}+{est.kind.value}"
        )

    return CovarianceEstimate(
        location=location,
        matrix=matrix,
        estimator_tag=tag,
        n_used=m.n,
        positive_definite=is_positive_definite(matrix),
    )

"""Principal component analysis from a classical or robust covariance.

All the principal components of a data set come straight out of the
eigendecomposition of its covariance (or correlation) matrix, so swapping
a robust estimate into that step is all it takes to robustify PCA. In
correlation mode the data are centered at the estimate's location and
scaled by the estimate's diagonal, which for the classical estimate is
ordinary z-scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataMatrix
from .errors import DataError, EstimatorError
from .numerics import eigen_sym
from .pairwise import CovarianceEstimate
from .scale import MADE, robust_scale

__all__ = [
    "PcaModel",
    "pca_fit",
    "biplot_data",
    "robust_column_standardization",
]

# eigenvalues of a PSD estimate may round slightly negative; anything worse
# means the input matrix was genuinely indefinite
_EIGENVALUE_SLACK = 1e-10


@dataclass(frozen=True)
class PcaModel:
    """Loadings (columns = PCs, descending eigenvalue), scores, and scaling."""

    loadings: np.ndarray
    eigenvalues: np.ndarray
    center: np.ndarray
    scale: np.ndarray
    scores: np.ndarray
    estimator_tag: str
    row_ids: tuple[str, ...]
    var_ids: tuple[str, ...]

    @property
    def p(self) -> int:
        return self.loadings.shape[0]

    def score_norms(self, i: int = 0, j: int = 1) -> np.ndarray:
        """Euclidean norm of each row's scores in the (i, j) PC plane."""
        return np.hypot(self.scores[:, i], self.scores[:, j])


def robust_column_standardization(m: DataMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Columnwise median and MADe, for robust score standardization.

    Robust biplots read best when each variable is standardized by the
    spread of its data bulk rather than by the covariance estimate's own
    diagonal; this is the standardization the robust CLI pipeline feeds to
    :func:`pca_fit`.
    """
    meds = np.median(m.values, axis=0)
    mades = np.array(
        [robust_scale(MADE, m.values[:, j]) for j in range(m.p)]
    )
    if np.any(mades <= 0):
        raise EstimatorError("a column has zero MADe; cannot standardize")
    return meds, mades


def pca_fit(
    m: DataMatrix,
    estimate: CovarianceEstimate,
    use_correlation: bool = True,
    center: np.ndarray | None = None,
    scale: np.ndarray | None = None,
) -> PcaModel:
    """Eigendecompose a covariance estimate and project the data onto it.

    With ``use_correlation`` the estimate is rescaled to unit diagonal
    first and the scores are computed from correspondingly standardized
    data; recommended whenever the variables differ widely in magnitude.
    By default the standardization comes from the estimate itself (its
    location and the square roots of its diagonal); pass ``center`` and
    ``scale`` to standardize differently, e.g. by columnwise median/MADe
    via :func:`robust_column_standardization`.
    """
    if m.n_missing:
        raise DataError(
            f"input has {m.n_missing} missing cells; impute before PCA"
        )
    if estimate.p != m.p:
        raise DataError(
            f"estimate dimension {estimate.p} does not match data (p={m.p})"
        )
    diag = np.diag(estimate.matrix)
    if use_correlation:
        if np.any(diag <= 0):
            raise EstimatorError(
                "correlation mode needs strictly positive diagonal entries"
            )
        default_scale = np.sqrt(diag)
        target = estimate.matrix / np.outer(default_scale, default_scale)
    else:
        default_scale = np.ones(m.p)
        target = estimate.matrix
    if center is None:
        center = estimate.location
    else:
        center = np.asarray(center, dtype=float)
    if scale is None:
        scale = default_scale
    else:
        scale = np.asarray(scale, dtype=float)
        if np.any(scale <= 0) or not use_correlation:
            raise EstimatorError(
                "score scale overrides need correlation mode and positive scales"
            )
    dec = eigen_sym(target)
    values = dec.values
    floor = -_EIGENVALUE_SLACK * max(1.0, float(abs(values[0])))
    if values[-1] < floor:
        raise EstimatorError(
            "covariance estimate is indefinite; PCA needs a PSD matrix"
        )
    values = np.maximum(values, 0.0)
    standardized = (m.values - center) / scale
    scores = standardized @ dec.vectors
    return PcaModel(
        loadings=dec.vectors,
        eigenvalues=values,
        center=center.copy(),
        scale=scale.copy(),
        scores=scores,
        estimator_tag=estimate.estimator_tag,
        row_ids=m.row_ids,
        var_ids=m.col_ids,
    )


def biplot_data(
    model: PcaModel, i: int = 0, j: int = 1
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Scatter points and labelled variable arrows for a PC-plane biplot.

    Points are the score columns (i, j); each variable's arrow is its
    loading row scaled by the square root of the displayed eigenvalues.
    """
    if i == j:
        raise ValueError("need two distinct principal components")
    for k in (i, j):
        if not 0 <= k < model.p:
            raise ValueError(f"PC index {k} out of range for p={model.p}")
    points = model.scores[:, (i, j)]
    arrows = model.loadings[:, (i, j)] * np.sqrt(model.eigenvalues[[i, j]])
    return points, arrows, model.var_ids

"""Data ellipses for Youden plots, built stepwise from a 2-D covariance.

The polygon is generated angle by angle: the upper arc runs theta from pi
to 0, the lower arc mirrors it (omitting the two shared endpoints), and
each standardized coordinate pair is rescaled by the marginal scales and
recentered at the (robust) centroid. Every vertex lies exactly on the
level set (q - c)' V^{-1} (q - c) = T^2, so the polygon is a faithful
contour of the Mahalanobis quadratic form.

T^2 comes from the F distribution when location and covariance were
estimated from the n plotted observations, or from chi-square(2) when they
are treated as known population values. The region covers a stated
proportion of observations; it is not a confidence region for the
centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EstimatorError
from .numerics import chisq_quantile, det_and_inverse, f_quantile
from .pairwise import CovarianceEstimate

__all__ = ["EllipsePolygon", "ellipse_t_sq", "ellipse_points", "point_in_ellipse"]

DEFAULT_N_POINTS = 100


@dataclass(frozen=True)
class EllipsePolygon:
    """Ordered open polygon tracing one coverage contour.

    ``points`` has 2 * n_points - 2 vertices; plotting code closes the
    curve by repeating the first vertex.
    """

    points: np.ndarray
    coverage: float
    t_sq: float
    source: CovarianceEstimate
    n: int

    def closed_points(self) -> np.ndarray:
        return np.vstack([self.points, self.points[:1]])


def ellipse_t_sq(coverage: float, n: int, known_params: bool = False) -> float:
    """Squared Mahalanobis radius enclosing the requested coverage.

    Estimated-parameters form: 2 (n-1) F_coverage(2, n-1) / (n-2).
    Known-parameters form: the chi-square(2) quantile.
    """
    if not 0.0 < coverage < 1.0:
        raise DataError(f"coverage must lie in (0, 1), got {coverage}")
    if known_params:
        return chisq_quantile(coverage, 2)
    if n < 4:
        raise DataError("need n >= 4 observations for the F-based radius")
    return 2.0 * (n - 1) * f_quantile(coverage, 2, n - 1) / (n - 2)


def _bivariate_params(estimate: CovarianceEstimate) -> tuple[float, float, float]:
    if estimate.p != 2:
        raise DataError(f"need a 2x2 covariance estimate, got p={estimate.p}")
    v = estimate.matrix
    if v[0, 0] <= 0 or v[1, 1] <= 0:
        raise EstimatorError("non-positive variance on the diagonal")
    s_i = math.sqrt(v[0, 0])
    s_j = math.sqrt(v[1, 1])
    r = v[0, 1] / (s_i * s_j)
    if abs(r) >= 1.0:
        raise EstimatorError(
            f"implied correlation {r:.6f} is not inside (-1, 1); "
            "the ellipse is degenerate"
        )
    return s_i, s_j, r


def ellipse_points(
    estimate: CovarianceEstimate,
    coverage: float,
    n: int | None = None,
    n_points: int = DEFAULT_N_POINTS,
) -> EllipsePolygon:
    """Plotting polygon for one coverage level of a bivariate estimate.

    ``n`` defaults to the number of observations behind the estimate
    (its ``n_used``), which sets the F-based radius.
    """
    if n_points < 8:
        raise DataError("need at least 8 points for a useful polygon")
    if n is None:
        n = estimate.n_used
    s_i, s_j, r = _bivariate_params(estimate)
    t_sq = ellipse_t_sq(coverage, n)
    t = math.sqrt(t_sq)

    theta = np.linspace(math.pi, 0.0, n_points)
    zx_up = t * np.cos(theta)
    # rounding can push the radicand a hair negative at the endpoints
    rad_up = np.maximum((1.0 - r * r) * (t_sq - zx_up**2), 0.0)
    zy_up = r * zx_up + np.sqrt(rad_up)
    zx_lo = zx_up[-2:0:-1]
    rad_lo = np.maximum((1.0 - r * r) * (t_sq - zx_lo**2), 0.0)
    zy_lo = r * zx_lo - np.sqrt(rad_lo)

    zx = np.concatenate([zx_up, zx_lo])
    zy = np.concatenate([zy_up, zy_lo])
    x = s_i * zx + estimate.location[0]
    y = s_j * zy + estimate.location[1]
    return EllipsePolygon(
        points=np.column_stack([x, y]),
        coverage=coverage,
        t_sq=t_sq,
        source=estimate,
        n=n,
    )


def point_in_ellipse(q, estimate: CovarianceEstimate, t_sq: float) -> bool:
    """True iff the quadratic form of q about the estimate is within t_sq."""
    point = np.asarray(q, dtype=float).ravel()
    if point.shape != (2,):
        raise DataError("point must be two-dimensional")
    if estimate.p != 2:
        raise DataError(f"need a 2x2 covariance estimate, got p={estimate.p}")
    _, inv = det_and_inverse(estimate.matrix)
    diff = point - estimate.location
    return float(diff @ inv @ diff) <= t_sq

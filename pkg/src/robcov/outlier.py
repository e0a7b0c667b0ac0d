"""Mahalanobis-distance screening of laboratories with chi-square cutoffs.

Squared distances from a (robust) location under a (robust) covariance are
approximately chi-square with p degrees of freedom for well-behaved data,
so the 95% and 99% quantiles give simple warning and action limits. The
screen is only as good as the covariance estimate behind it: with the
classical estimate a few gross outliers inflate the covariance enough to
hide themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import DataMatrix
from .errors import DataError
from .numerics import chisq_quantile, det_and_inverse
from .pairwise import CovarianceEstimate

__all__ = ["Flag", "OutlierReport", "mahalanobis_sq", "screen"]


class Flag(str, Enum):
    INLIER = "inlier"
    WARN95 = "warn95"
    ACTION99 = "action99"


@dataclass(frozen=True)
class OutlierReport:
    """Per-laboratory squared distances and flags against chi-square limits."""

    rows: tuple[tuple[str, float, Flag], ...]
    crit95: float
    crit99: float
    estimator_tag: str

    def flagged(self, level: Flag) -> tuple[str, ...]:
        """Row ids at exactly the given flag level."""
        return tuple(rid for rid, _, f in self.rows if f is level)

    def at_least(self, level: Flag) -> tuple[str, ...]:
        """Row ids at the given flag level or worse."""
        ordering = {Flag.INLIER: 0, Flag.WARN95: 1, Flag.ACTION99: 2}
        return tuple(
            rid for rid, _, f in self.rows if ordering[f] >= ordering[level]
        )

    def distances(self) -> dict[str, float]:
        return {rid: d for rid, d, _ in self.rows}


def mahalanobis_sq(z, location, v) -> float:
    """Squared Mahalanobis distance of a point from a location under v."""
    z = np.asarray(z, dtype=float).ravel()
    loc = np.asarray(location, dtype=float).ravel()
    if z.shape != loc.shape:
        raise ValueError("point and location dimensions differ")
    _, inv = det_and_inverse(v)
    diff = z - loc
    return float(diff @ inv @ diff)


def screen(m: DataMatrix, estimate: CovarianceEstimate) -> OutlierReport:
    """Score every row of a complete matrix against the given estimate.

    Flags: action99 when d^2 exceeds the 99% chi-square quantile, warn95
    when it exceeds only the 95% quantile.
    """
    if m.n_missing:
        raise DataError(
            f"input has {m.n_missing} missing cells; impute before screening"
        )
    if estimate.p != m.p:
        raise DataError(
            f"estimate dimension {estimate.p} does not match data (p={m.p})"
        )
    crit95 = chisq_quantile(0.95, m.p)
    crit99 = chisq_quantile(0.99, m.p)
    _, inv = det_and_inverse(estimate.matrix)
    diff = m.values - estimate.location
    d2 = np.einsum("ij,jk,ik->i", diff, inv, diff)
    rows = []
    for rid, dist in zip(m.row_ids, d2):
        dist = float(dist)
        if dist > crit99:
            flag = Flag.ACTION99
        elif dist > crit95:
            flag = Flag.WARN95
        else:
            flag = Flag.INLIER
        rows.append((rid, dist, flag))
    return OutlierReport(
        rows=tuple(rows),
        crit95=crit95,
        crit99=crit99,
        estimator_tag=estimate.estimator_tag,
    )

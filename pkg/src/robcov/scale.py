"""Robust univariate location and scale estimators.

These are the building blocks for every pairwise covariance estimator in
the package: the scaled median absolute deviation (MADe), the Rousseeuw-
Croux Qn, the Yohai-Zamar tau scale, and the classical standard deviation
as the non-robust reference. Each scale kind is paired with a natural
location estimate (see :func:`robust_location`).

A vector of identical values yields scale 0 rather than an error; callers
that cannot proceed with a zero scale raise there, where context exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ScaleKind",
    "ScaleEstimator",
    "MADE",
    "QN",
    "TAU",
    "SD",
    "median",
    "robust_scale",
    "robust_location",
]

# consistency factor making the MAD unbiased for sigma at the normal
MADE_CONSISTENCY = 1.4826

# Qn consistency factor and the Croux-Rousseeuw finite-sample corrections
QN_CONSISTENCY = 2.2219
_QN_SMALL_N = {2: 0.399, 3: 0.994, 4: 0.512, 5: 0.844, 6: 0.611, 7: 0.857,
               8: 0.669, 9: 0.872}


class ScaleKind(str, Enum):
    MADE = "made"
    QN = "qn"
    TAU = "tau"
    SD = "sd"


@dataclass(frozen=True)
class ScaleEstimator:
    """Choice of robust scale, threaded through all GK-family estimators.

    The tau scale carries its two tuning constants; they are ignored by the
    other kinds.
    """

    kind: ScaleKind
    c1: float = 4.5
    c2: float = 3.0


MADE = ScaleEstimator(ScaleKind.MADE)
QN = ScaleEstimator(ScaleKind.QN)
TAU = ScaleEstimator(ScaleKind.TAU)
SD = ScaleEstimator(ScaleKind.SD)


def _as_vector(x, min_len: int = 1) -> np.ndarray:
    a = np.asarray(x, dtype=float).ravel()
    if a.size < min_len:
        raise ValueError(f"need at least {min_len} values, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector contains non-finite entries")
    return a


def median(x) -> float:
    """Sample median (mean of the central pair for even length)."""
    return float(np.median(_as_vector(x)))


def _mad_e(a: np.ndarray) -> float:
    return MADE_CONSISTENCY * float(np.median(np.abs(a - np.median(a))))


def _qn(a: np.ndarray) -> float:
    n = a.size
    h = n // 2 + 1
    k = h * (h - 1) // 2
    i, j = np.triu_indices(n, k=1)
    diffs = np.abs(a[i] - a[j])
    kth = np.partition(diffs, k - 1)[k - 1]
    if n < 10:
        corr = _QN_SMALL_N[n]
    elif n % 2 == 1:
        corr = n / (n + 1.4)
    else:
        corr = n / (n + 3.8)
    return QN_CONSISTENCY * corr * float(kth)


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _truncated_sq_moment(b: float) -> float:
    """E[min(Z^2, b^2)] for standard normal Z."""
    pdf = math.exp(-b * b / 2.0) / math.sqrt(2.0 * math.pi)
    return 2.0 * ((1.0 - b * b) * _normal_cdf(b) - b * pdf + b * b) - 1.0


# third quartile of the standard normal, MAD-to-sigma conversion point
_NORMAL_Q75 = 0.6744897501960817


def _tau(a: np.ndarray, c1: float, c2: float) -> tuple[float, float]:
    """Two-step tau estimate; returns (location, scale).

    Step 1: weighted mean with biweight-style weights cut at c1 units of
    the unscaled MAD. Step 2: truncated second moment with
    rho(u) = min(u^2, c2^2), divided by the normal-consistency constant so
    the scale estimates sigma at the normal. Falls back to (median, 0)
    when the MAD is zero.
    """
    med = float(np.median(a))
    s0 = float(np.median(np.abs(a - med)))
    if s0 == 0.0:
        return med, 0.0
    u = (a - med) / (s0 * c1)
    w = np.where(np.abs(u) <= 1.0, (1.0 - u**2) ** 2, 0.0)
    loc = float(np.sum(w * a) / np.sum(w))
    v = (a - loc) / s0
    rho = np.minimum(v**2, c2**2)
    consistency = _truncated_sq_moment(c2 * _NORMAL_Q75)
    return loc, float(s0 * np.sqrt(np.mean(rho) / consistency))


def robust_scale(est: ScaleEstimator, x) -> float:
    """Scale estimate for the chosen kind; 0 for an all-equal vector."""
    a = _as_vector(x, min_len=2)
    if est.kind is ScaleKind.MADE:
        return _mad_e(a)
    if est.kind is ScaleKind.QN:
        return _qn(a)
    if est.kind is ScaleKind.TAU:
        return _tau(a, est.c1, est.c2)[1]
    return float(np.std(a, ddof=1))


def robust_location(est: ScaleEstimator, x) -> float:
    """Location paired with the scale kind.

    Median for MADe and Qn, the tau weighted mean for the tau scale, and
    the arithmetic mean for the classical standard deviation.
    """
    a = _as_vector(x, min_len=1)
    if est.kind in (ScaleKind.MADE, ScaleKind.QN):
        return float(np.median(a))
    if est.kind is ScaleKind.TAU:
        if a.size == 1:
            return float(a[0])
        return _tau(a, est.c1, est.c2)[0]
    return float(np.mean(a))

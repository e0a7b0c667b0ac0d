"""Minimum Covariance Determinant estimator.

Finds the h-row subset whose classical covariance matrix has the smallest
determinant, then rescales that covariance for consistency at the normal
and (optionally) reweights against a chi-square cutoff.

Two search strategies are used. When the number of candidate subsets
C(n, h) is at or below ``exhaustive_limit`` the search enumerates every
subset (vectorized over blocks of combinadic ranks), so results at typical
inter-laboratory study sizes are exact and free of random-restart bias.
Larger problems fall back to the classic concentration-step search: many
seeded random (p+1)-point starts, each iterated to a C-step fixed point.
Both searches break determinant ties by the lexicographically smallest
subset, so results are reproducible bit for bit given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import DataMatrix
from .errors import DataError, EstimatorError
from .numerics import chisq_cdf, chisq_quantile, is_positive_definite
from .pairwise import CovarianceEstimate

__all__ = [
    "McdConfig",
    "McdResult",
    "cov_mcd",
    "c_step",
    "mcd_consistency_factor",
    "derive_h",
]

REWEIGHT_QUANTILE = 0.975

_CHUNK = 1 << 18
_MAX_CSTEPS = 200


@dataclass(frozen=True)
class McdConfig:
    """Search and rescaling options for cov_mcd."""

    h_fraction: float = 0.5
    n_starts: int = 500
    exhaustive_limit: int = 6_000_000
    seed: int = 0
    reweight: bool = True


@dataclass(frozen=True)
class McdResult:
    """Best subset found plus the finished covariance estimate."""

    estimate: CovarianceEstimate
    subset: tuple[int, ...]
    raw_determinant: float
    exhaustive: bool
    h: int = field(default=0)


def derive_h(n: int, p: int, h_fraction: float) -> int:
    """Subset size: the requested fraction, floored to the validity bound.

    The second term guarantees h > n/2 and leaves a nonsingularity margin,
    matching the usual convention for this estimator.
    """
    if not 0.5 <= h_fraction <= 1.0:
        raise ValueError(f"h_fraction must lie in [0.5, 1.0], got {h_fraction}")
    return max(int(math.floor(h_fraction * n)), (n + p + 1) // 2)


def mcd_consistency_factor(h_over_n: float, p: int) -> float:
    """Asymptotic rescaling making the subset covariance unbiased at the normal.

    c = alpha / P(chi2_{p+2} <= q_alpha(p)) where alpha = h/n and q_alpha(p)
    is the alpha quantile of chi2(p). Equals 1 when nothing is truncated
    and grows as the kept fraction shrinks.
    """
    if not 0.5 <= h_over_n <= 1.0:
        raise ValueError(f"h/n must lie in [0.5, 1.0], got {h_over_n}")
    if p < 1:
        raise ValueError("dimension must be a positive integer")
    if h_over_n == 1.0:
        return 1.0
    return h_over_n / chisq_cdf(chisq_quantile(h_over_n, p), p + 2)


def _validated_values(m: DataMatrix) -> np.ndarray:
    if m.n_missing:
        raise DataError(
            f"input has {m.n_missing} missing cells; impute before estimating"
        )
    return m.values


def _mean_cov(x: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sub = x[idx]
    mean = sub.mean(axis=0)
    centered = sub - mean
    cov = centered.T @ centered / (sub.shape[0] - 1)
    return mean, cov


def _distances_sq(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    diff = x - mean
    try:
        sol = np.linalg.solve(cov, diff.T)
    except np.linalg.LinAlgError as exc:
        raise EstimatorError("singular subset covariance") from exc
    return np.einsum("ij,ji->i", diff, sol)


def c_step(m: DataMatrix, subset) -> tuple[int, ...]:
    """One concentration step.

    From the given subset's mean and covariance, returns the indices of the
    len(subset) rows with smallest Mahalanobis distance. The determinant of
    the new subset's covariance never exceeds the old one's.
    """
    x = _validated_values(m)
    idx = np.asarray(sorted(int(i) for i in subset), dtype=np.intp)
    if idx.size < 2 or np.unique(idx).size != idx.size:
        raise ValueError("subset must contain at least two distinct indices")
    if idx.min() < 0 or idx.max() >= m.n:
        raise ValueError("subset index out of range")
    mean, cov = _mean_cov(x, idx)
    det = float(np.linalg.det(cov))
    if not math.isfinite(det) or det <= 0.0:
        raise EstimatorError("singular subset covariance")
    d2 = _distances_sq(x, mean, cov)
    order = np.argsort(d2, kind="stable")
    return tuple(int(i) for i in np.sort(order[: idx.size]))


# ---------------------------------------------------------------------------
# Exhaustive search over combinadic ranks
# ---------------------------------------------------------------------------


def _comb_tables(n: int, h: int) -> list[np.ndarray]:
    return [
        np.array([math.comb(c, k) for c in range(n)], dtype=np.int64)
        for k in range(h + 1)
    ]


def _unrank(ranks: np.ndarray, h: int, tables: list[np.ndarray]) -> np.ndarray:
    """Map combinadic ranks to index rows (descending within each row)."""
    rem = ranks.astype(np.int64, copy=True)
    out = np.empty((ranks.size, h), dtype=np.intp)
    for k in range(h, 0, -1):
        col = tables[k]
        c = np.searchsorted(col, rem, side="right") - 1
        out[:, h - k] = c
        rem -= col[c]
    return out


def _subset_dets_from_moments(
    s: np.ndarray, h: int, p: int, pairs: list[tuple[int, int]]
) -> np.ndarray:
    """Batched subset covariance determinants from accumulated moment sums.

    ``s`` holds, per subset, the p coordinate sums followed by the
    p(p+1)/2 upper-triangle product sums.
    """
    s1 = s[:, :p]
    if p == 1:
        return (s[:, 1] - s1[:, 0] ** 2 / h) / (h - 1)
    if p == 2:
        a = s[:, 2] - s1[:, 0] ** 2 / h
        b = s[:, 3] - s1[:, 0] * s1[:, 1] / h
        c = s[:, 4] - s1[:, 1] ** 2 / h
        return (a * c - b * b) / (h - 1) ** 2
    m2 = np.empty((s.shape[0], p, p))
    for col, (i, j) in enumerate(pairs):
        m2[:, i, j] = m2[:, j, i] = s[:, p + col]
    covs = (m2 - s1[:, :, None] * s1[:, None, :] / h) / (h - 1)
    return np.linalg.det(covs)


def _exhaustive_best(xc: np.ndarray, h: int) -> tuple[tuple[int, ...], float]:
    """Global minimizer over all C(n, h) subsets; ties broken lexicographically.

    Enumerates the complements (size n - h, always the smaller side since
    h > n/2) as vectorized blocks of combinadic ranks; subset moment sums
    are the column totals minus the complement's sums.
    """
    n, p = xc.shape
    k = n - h
    total = math.comb(n, k)
    tables = _comb_tables(n, k)
    pairs = [(i, j) for i in range(p) for j in range(i, p)]
    mom = np.concatenate(
        [xc] + [(xc[:, i] * xc[:, j])[:, None] for (i, j) in pairs], axis=1
    )
    totals = mom.sum(axis=0)
    chunk = _CHUNK if p <= 4 else _CHUNK // 4
    best_det = math.inf
    tie_ranks: list[int] = []
    for start in range(0, total, chunk):
        ranks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        idx = _unrank(ranks, k, tables)
        acc = np.zeros((ranks.size, mom.shape[1]))
        for pos in range(k):
            acc += mom[idx[:, pos]]
        dets = _subset_dets_from_moments(totals - acc, h, p, pairs)
        vmin = float(dets.min())
        if vmin < best_det:
            best_det = vmin
            tie_ranks = ranks[dets == vmin].tolist()
        elif vmin == best_det:
            tie_ranks.extend(ranks[dets == vmin].tolist())
    if not math.isfinite(best_det) or best_det <= 0.0:
        raise EstimatorError(
            "smallest subset determinant is zero: exact collinearity in the data"
        )
    best: tuple[int, ...] | None = None
    for r in tie_ranks:
        row = _unrank(np.array([r], dtype=np.int64), k, tables)[0]
        dropped = {int(c) for c in row}
        asc = tuple(i for i in range(n) if i not in dropped)
        if best is None or asc < best:
            best = asc
    assert best is not None
    return best, best_det


# ---------------------------------------------------------------------------
# Concentration-step search
# ---------------------------------------------------------------------------


def _concentrate(
    x: np.ndarray, idx: np.ndarray, h: int
) -> tuple[np.ndarray, float] | None:
    """Iterate C-steps from an h-subset to a fixed point; None if singular."""
    for _ in range(_MAX_CSTEPS):
        mean, cov = _mean_cov(x, idx)
        det = float(np.linalg.det(cov))
        if not math.isfinite(det) or det <= 0.0:
            return None
        try:
            d2 = _distances_sq(x, mean, cov)
        except EstimatorError:
            return None
        new = np.sort(np.argsort(d2, kind="stable")[:h])
        if np.array_equal(new, idx):
            return idx, det
        idx = new
    return idx, det


def _concentration_best(
    x: np.ndarray, h: int, cfg: McdConfig
) -> tuple[tuple[int, ...], float]:
    n, p = x.shape
    rng = np.random.default_rng(cfg.seed)
    best: tuple[float, tuple[int, ...]] | None = None
    for _ in range(cfg.n_starts):
        perm = rng.permutation(n)
        # grow the start until its covariance is nonsingular
        seed_idx = None
        for size in range(p + 1, n + 1):
            cand = np.sort(perm[:size])
            _, cov = _mean_cov(x, cand)
            det = float(np.linalg.det(cov))
            if math.isfinite(det) and det > 0.0:
                seed_idx = cand
                break
        if seed_idx is None:
            continue
        mean, cov = _mean_cov(x, seed_idx)
        try:
            d2 = _distances_sq(x, mean, cov)
        except EstimatorError:
            continue
        idx = np.sort(np.argsort(d2, kind="stable")[:h])
        result = _concentrate(x, idx, h)
        if result is None:
            continue
        final_idx, det = result
        candidate = (det, tuple(int(i) for i in final_idx))
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise EstimatorError(
            "no nonsingular subset found: exact collinearity in the data"
        )
    return best[1], best[0]


def cov_mcd(m: DataMatrix, cfg: McdConfig | None = None) -> McdResult:
    """Minimum covariance determinant location and scatter.

    The raw subset covariance is rescaled by the asymptotic consistency
    factor; with ``cfg.reweight`` the final estimate is the classical
    covariance of the rows within the chi2(0.975, p) cutoff of the raw
    estimate, rescaled analogously.
    """
    if cfg is None:
        cfg = McdConfig()
    x = _validated_values(m)
    n, p = x.shape
    h = derive_h(n, p, cfg.h_fraction)
    if p >= h:
        raise DataError(f"need p < h (p={p}, h={h}); too few rows per variable")
    if n < p + 2:
        raise DataError(f"need n >= p + 2 (n={n}, p={p})")
    exhaustive = math.comb(n, h) <= cfg.exhaustive_limit
    xc = x - x.mean(axis=0)
    if exhaustive:
        subset, _ = _exhaustive_best(xc, h)
    else:
        subset, _ = _concentration_best(x, h, cfg)

    idx = np.asarray(subset, dtype=np.intp)
    location, raw_cov = _mean_cov(x, idx)
    raw_det = float(np.linalg.det(raw_cov))
    if not math.isfinite(raw_det) or raw_det <= 0.0:
        raise EstimatorError("best subset covariance is singular")
    matrix = raw_cov * mcd_consistency_factor(h / n, p)
    tag = f"mcd(h={h}/{n})"

    if cfg.reweight:
        d2 = _distances_sq(x, location, matrix)
        keep = d2 <= chisq_quantile(REWEIGHT_QUANTILE, p)
        if int(keep.sum()) <= p:
            raise EstimatorError("reweighting kept too few rows")
        kept = x[keep]
        location = kept.mean(axis=0)
        centered = kept - location
        matrix = (
            centered.T
            @ centered
            / (kept.shape[0] - 1)
            * mcd_consistency_factor(REWEIGHT_QUANTILE, p)
        )
        tag += "+reweighted"

    estimate = CovarianceEstimate(
        location=location,
        matrix=matrix,
        estimator_tag=tag,
        n_used=n,
        positive_definite=is_positive_definite(matrix),
    )
    return McdResult(
        estimate=estimate,
        subset=tuple(int(i) for i in subset),
        raw_determinant=raw_det,
        exhaustive=exhaustive,
        h=h,
    )

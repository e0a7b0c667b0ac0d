"""Robust covariance estimation and multivariate outlier screening.

Tools for inspecting inter-laboratory study data: outlier-resistant
covariance/correlation estimators (rank-based, Gnanadesikan-Kettenring,
OGK, MCD), robust Mahalanobis screening against chi-square cutoffs,
robust PCA, and Youden-plot data ellipses, plus a CLI that ties the
pieces together.
"""

__version__ = "0.1.0"

from .dataset import (
    DataMatrix,
    ImputationRecord,
    fixture,
    impute_median,
    parse_csv,
    to_csv,
)
from .ellipse import EllipsePolygon, ellipse_points, ellipse_t_sq, point_in_ellipse
from .errors import DataError, EstimatorError, RobcovError
from .mcd import McdConfig, McdResult, c_step, cov_mcd, mcd_consistency_factor
from .numerics import (
    EigenDecomposition,
    chisq_cdf,
    chisq_quantile,
    det_and_inverse,
    eigen_sym,
    f_cdf,
    f_quantile,
)
from .ogk import cov_ogk, ogk_distances
from .outlier import Flag, OutlierReport, mahalanobis_sq, screen
from .pairwise import (
    CovarianceEstimate,
    cor_gk,
    cov_classical,
    cov_gk,
    cov_rank,
    cov_rgk,
    kendall_tau,
    pairwise_matrix,
    pearson_r,
    spearman_rho,
)
from .pca import PcaModel, biplot_data, pca_fit, robust_column_standardization
from .scale import (
    MADE,
    QN,
    SD,
    TAU,
    ScaleEstimator,
    ScaleKind,
    median,
    robust_location,
    robust_scale,
)

__all__ = [
    "__version__",
    "DataMatrix",
    "ImputationRecord",
    "fixture",
    "impute_median",
    "parse_csv",
    "to_csv",
    "EllipsePolygon",
    "ellipse_points",
    "ellipse_t_sq",
    "point_in_ellipse",
    "DataError",
    "EstimatorError",
    "RobcovError",
    "McdConfig",
    "McdResult",
    "c_step",
    "cov_mcd",
    "mcd_consistency_factor",
    "EigenDecomposition",
    "chisq_cdf",
    "chisq_quantile",
    "det_and_inverse",
    "eigen_sym",
    "f_cdf",
    "f_quantile",
    "cov_ogk",
    "ogk_distances",
    "Flag",
    "OutlierReport",
    "mahalanobis_sq",
    "screen",
    "CovarianceEstimate",
    "cor_gk",
    "cov_classical",
    "cov_gk",
    "cov_rank",
    "cov_rgk",
    "kendall_tau",
    "pairwise_matrix",
    "pearson_r",
    "spearman_rho",
    "PcaModel",
    "biplot_data",
    "pca_fit",
    "robust_column_standardization",
    "ScaleEstimator",
    "ScaleKind",
    "MADE",
    "QN",
    "SD",
    "TAU",
    "median",
    "robust_location",
    "robust_scale",
]

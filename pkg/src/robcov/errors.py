"""Exception hierarchy shared by all robcov modules.

DataError covers malformed or inadmissible input (CLI exit code 2),
EstimatorError covers numerical failures of an estimator on valid input,
such as a singular covariance matrix (CLI exit code 3).
"""


class RobcovError(Exception):
    """Base class for all robcov errors."""


class DataError(RobcovError):
    """Invalid input data or configuration."""


class EstimatorError(RobcovError):
    """An estimator could not produce a valid result (e.g. singular matrix)."""

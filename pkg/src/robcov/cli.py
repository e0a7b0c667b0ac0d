"""Command-line front end: data in, reports and figures out.

Five subcommands cover the three applications plus utilities:

  cov     covariance/correlation matrices for any estimator
  youden  two-material scatter with robust data ellipses
  mhd     Mahalanobis-distance screen with chi-square critical values
  impute  column-median imputation of missing cells
  pca     classical or robust principal component biplot

Exit codes: 0 success, 2 invalid input or configuration, 3 estimator
failure (e.g. a singular covariance). Outputs are deterministic: identical
invocations (including --seed) produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    DEFAULT_NA_TOKEN,
    DataMatrix,
    ImputationRecord,
    impute_median,
    parse_csv,
    to_csv,
)
from .ellipse import EllipsePolygon, ellipse_points, ellipse_t_sq
from .errors import DataError, EstimatorError, RobcovError
from .mcd import McdConfig, McdResult, cov_mcd
from .numerics import det_and_inverse
from .ogk import cov_ogk
from .outlier import screen
from .pairwise import CovarianceEstimate, pairwise_matrix
from .pca import biplot_data, pca_fit, robust_column_standardization
from .scale import MADE, QN, SD, TAU, ScaleEstimator
from .svgplot import biplot_svg, distance_svg, youden_svg

ESTIMATORS = (
    "classical",
    "rank_spearman",
    "rank_kendall",
    "gk",
    "rgk",
    "ogk",
    "mcd",
)

SCALES = {"made": MADE, "qn": QN, "tau": TAU, "sd": SD}

DEFAULT_ESTIMATOR = {
    "cov": "classical",
    "youden": "rgk",
    "mhd": "ogk",
    "pca": "mcd",
}

SEED_ENV_VAR = "ROBCOV_SEED"

# how many of the most extreme laboratories get labels on the biplot
BIPLOT_LABELS = 4


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, resolved from flags and env."""

    command: str
    input_path: Path
    estimator: str
    scale: ScaleEstimator
    coverage_levels: tuple[float, ...] = (0.95, 0.99)
    mcd: McdConfig = field(default_factory=McdConfig)
    out_dir: Path = Path("robcov_out")
    formats: frozenset[str] = frozenset({"csv", "json", "svg"})
    cols: tuple[str, str] | None = None
    na_token: str = DEFAULT_NA_TOKEN


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(v: float) -> str:
    """CSV numeric formatting: six significant digits."""
    return f"{float(v):.6g}"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _matrix_csv(matrix: np.ndarray, col_ids: tuple[str, ...]) -> str:
    header = ["", *col_ids]
    rows = [
        [col_ids[i], *[_num(v) for v in matrix[i]]]
        for i in range(matrix.shape[0])
    ]
    return _csv_text(header, rows)


def _imputation_payload(record: ImputationRecord) -> list[dict]:
    return [
        {"row_id": rid, "col_id": cid, "imputed_value": value}
        for rid, cid, value in record.entries
    ]


# ---------------------------------------------------------------------------
# Estimator dispatch
# ---------------------------------------------------------------------------


def compute_estimate(
    m: DataMatrix, cfg: RunConfig
) -> tuple[CovarianceEstimate, McdResult | None]:
    """Run the configured estimator; returns the MCD result when relevant."""
    name = cfg.estimator
    if name == "classical":
        return pairwise_matrix("classical", SD, m), None
    if name == "rank_spearman":
        return pairwise_matrix("rank", cfg.scale, m, "spearman"), None
    if name == "rank_kendall":
        return pairwise_matrix("rank", cfg.scale, m, "kendall"), None
    if name in ("gk", "rgk"):
        return pairwise_matrix(name, cfg.scale, m), None
    if name == "ogk":
        return cov_ogk(m, cfg.scale), None
    if name == "mcd":
        result = cov_mcd(m, cfg.mcd)
        return result.estimate, result
    raise DataError(f"unknown estimator {name!r}")


def _mcd_payload(m: DataMatrix, result: McdResult) -> dict:
    return {
        "h": result.h,
        "exhaustive": result.exhaustive,
        "raw_determinant": result.raw_determinant,
        "subset_row_ids": [m.row_ids[i] for i in result.subset],
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _load_matrix(cfg: RunConfig) -> DataMatrix:
    try:
        text = cfg.input_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {cfg.input_path}: {exc}") from exc
    return parse_csv(text, na_token=cfg.na_token)


def _require_complete(m: DataMatrix, command: str) -> DataMatrix:
    if m.n_missing:
        raise DataError(
            f"{command} needs complete data but {m.n_missing} cells are "
            "missing; run `robcov impute` first"
        )
    return m


def cmd_cov(cfg: RunConfig) -> None:
    m = _require_complete(_load_matrix(cfg), "cov")
    estimate, mcd_result = compute_estimate(m, cfg)
    out = cfg.out_dir
    if "csv" in cfg.formats:
        _atomic_write(out / "covariance.csv", _matrix_csv(estimate.matrix, m.col_ids))
        _atomic_write(
            out / "correlation.csv", _matrix_csv(estimate.correlation(), m.col_ids)
        )
    if "json" in cfg.formats:
        payload = {
            "estimator_tag": estimate.estimator_tag,
            "n_used": estimate.n_used,
            "positive_definite": estimate.positive_definite,
            "columns": list(m.col_ids),
            "location": estimate.location.tolist(),
            "covariance": estimate.matrix.tolist(),
            "correlation": estimate.correlation().tolist(),
        }
        if mcd_result is not None:
            payload["mcd"] = _mcd_payload(m, mcd_result)
        _atomic_write(out / "covariance.json", _json_text(payload))


def _coverage_name(coverage: float) -> str:
    return f"{coverage * 100:g}"


def cmd_youden(cfg: RunConfig) -> None:
    m = _require_complete(_load_matrix(cfg), "youden")
    if cfg.cols is not None:
        m = m.select_columns(list(cfg.cols))
    if m.p != 2:
        raise DataError(
            f"youden needs exactly 2 data columns (got {m.p}); "
            "use --cols A,B to pick a pair"
        )
    estimate, mcd_result = compute_estimate(m, cfg)
    levels = tuple(sorted(cfg.coverage_levels))
    polygons: list[EllipsePolygon] = [
        ellipse_points(estimate, coverage) for coverage in levels
    ]
    _, inv = det_and_inverse(estimate.matrix)
    diff = m.values - estimate.location
    qforms = np.einsum("ij,jk,ik->i", diff, inv, diff)
    outermost = polygons[-1]
    outside_outer = tuple(
        rid for rid, q in zip(m.row_ids, qforms) if q > outermost.t_sq
    )

    out = cfg.out_dir
    if "csv" in cfg.formats:
        for poly in polygons:
            closed = poly.closed_points()
            text = _csv_text(
                [m.col_ids[0], m.col_ids[1]],
                [[_num(x), _num(y)] for x, y in closed],
            )
            _atomic_write(
                out / f"ellipse_{_coverage_name(poly.coverage)}.csv", text
            )
        header = [
            "row_id",
            m.col_ids[0],
            m.col_ids[1],
            "quadratic_form",
            *[f"outside_{_coverage_name(p.coverage)}" for p in polygons],
        ]
        rows = []
        for i, rid in enumerate(m.row_ids):
            rows.append(
                [
                    rid,
                    _num(m.values[i, 0]),
                    _num(m.values[i, 1]),
                    _num(qforms[i]),
                    *[str(qforms[i] > p.t_sq).lower() for p in polygons],
                ]
            )
        _atomic_write(out / "youden_outliers.csv", _csv_text(header, rows))
    if "json" in cfg.formats:
        payload = {
            "estimator_tag": estimate.estimator_tag,
            "n_used": estimate.n_used,
            "columns": list(m.col_ids),
            "centroid": estimate.location.tolist(),
            "covariance": estimate.matrix.tolist(),
            "correlation": estimate.correlation().tolist(),
            "t_sq": {
                _coverage_name(p.coverage): p.t_sq for p in polygons
            },
            "quadratic_form": dict(
                zip(m.row_ids, (float(q) for q in qforms))
            ),
            "outside": {
                _coverage_name(p.coverage): [
                    rid
                    for rid, q in zip(m.row_ids, qforms)
                    if q > p.t_sq
                ]
                for p in polygons
            },
        }
        if mcd_result is not None:
            payload["mcd"] = _mcd_payload(m, mcd_result)
        _atomic_write(out / "youden.json", _json_text(payload))
    if "svg" in cfg.formats:
        svg = youden_svg(
            points=m.values,
            row_ids=m.row_ids,
            ellipses=[
                (p.coverage, p.closed_points()) for p in polygons
            ],
            centroid=(
                float(estimate.location[0]),
                float(estimate.location[1]),
            ),
            label_ids=outside_outer,
            xlabel=m.col_ids[0],
            ylabel=m.col_ids[1],
        )
        _atomic_write(out / "youden.svg", svg)


def cmd_mhd(cfg: RunConfig) -> None:
    m, record = impute_median(_load_matrix(cfg))
    estimate, mcd_result = compute_estimate(m, cfg)
    report = screen(m, estimate)
    out = cfg.out_dir
    if "csv" in cfg.formats:
        rows = [
            [rid, _num(d), flag.value] for rid, d, flag in report.rows
        ]
        _atomic_write(
            out / "distances.csv",
            _csv_text(["row_id", "distance_sq", "flag"], rows),
        )
    if "json" in cfg.formats:
        payload = {
            "estimator_tag": report.estimator_tag,
            "crit95": report.crit95,
            "crit99": report.crit99,
            "rows": [
                {
                    "row_id": rid,
                    "distance_sq": d,
                    "distance": float(np.sqrt(d)),
                    "flag": flag.value,
                }
                for rid, d, flag in report.rows
            ],
            "imputation": _imputation_payload(record),
        }
        if mcd_result is not None:
            payload["mcd"] = _mcd_payload(m, mcd_result)
        _atomic_write(out / "mhd.json", _json_text(payload))
    if "svg" in cfg.formats:
        svg = distance_svg(
            row_ids=m.row_ids,
            distances=tuple(d for _, d, _ in report.rows),
            crit95=report.crit95,
            crit99=report.crit99,
        )
        _atomic_write(out / "mhd.svg", svg)


def cmd_pca(cfg: RunConfig) -> None:
    m, record = impute_median(_load_matrix(cfg))
    estimate, mcd_result = compute_estimate(m, cfg)
    if cfg.estimator == "classical":
        model = pca_fit(m, estimate, use_correlation=True)
    else:
        center, col_scale = robust_column_standardization(m)
        model = pca_fit(
            m, estimate, use_correlation=True, center=center, scale=col_scale
        )
    points, arrows, var_ids = biplot_data(model, 0, 1)
    norms = model.score_norms()
    order = np.argsort(norms, kind="stable")[::-1]
    label_ids = tuple(m.row_ids[i] for i in order[:BIPLOT_LABELS])

    out = cfg.out_dir
    pc_names = [f"PC{k + 1}" for k in range(model.p)]
    if "csv" in cfg.formats:
        _atomic_write(
            out / "scores.csv",
            _csv_text(
                ["row_id", *pc_names],
                [
                    [rid, *[_num(v) for v in model.scores[i]]]
                    for i, rid in enumerate(m.row_ids)
                ],
            ),
        )
        _atomic_write(
            out / "loadings.csv",
            _csv_text(
                ["variable", *pc_names],
                [
                    [cid, *[_num(v) for v in model.loadings[j]]]
                    for j, cid in enumerate(m.col_ids)
                ],
            ),
        )
        _atomic_write(
            out / "eigenvalues.csv",
            _csv_text(
                ["component", "eigenvalue"],
                [
                    [pc_names[k], _num(model.eigenvalues[k])]
                    for k in range(model.p)
                ],
            ),
        )
    if "json" in cfg.formats:
        payload = {
            "estimator_tag": model.estimator_tag,
            "eigenvalues": model.eigenvalues.tolist(),
            "center": model.center.tolist(),
            "scale": model.scale.tolist(),
            "columns": list(m.col_ids),
            "labelled": list(label_ids),
            "imputation": _imputation_payload(record),
        }
        if mcd_result is not None:
            payload["mcd"] = _mcd_payload(m, mcd_result)
        _atomic_write(out / "pca.json", _json_text(payload))
    if "svg" in cfg.formats:
        svg = biplot_svg(
            points=points,
            row_ids=m.row_ids,
            arrows=arrows,
            var_ids=var_ids,
            label_ids=label_ids,
        )
        _atomic_write(out / "biplot.svg", svg)


def cmd_impute(cfg: RunConfig) -> None:
    m, record = impute_median(_load_matrix(cfg))
    out = cfg.out_dir
    if "csv" in cfg.formats:
        _atomic_write(out / "imputed.csv", to_csv(m, na_token=cfg.na_token))
    if "json" in cfg.formats:
        payload = {
            "n_imputed": len(record),
            "entries": _imputation_payload(record),
        }
        _atomic_write(out / "imputation.json", _json_text(payload))


COMMANDS = {
    "cov": cmd_cov,
    "youden": cmd_youden,
    "mhd": cmd_mhd,
    "pca": cmd_pca,
    "impute": cmd_impute,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robcov",
        description=(
            "Robust covariance estimation and multivariate outlier "
            "screening for inter-laboratory study data."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("cov", "write covariance and correlation matrices"),
        ("youden", "Youden plot with data ellipses (2 columns)"),
        ("mhd", "Mahalanobis distance screen with chi-square cutoffs"),
        ("pca", "principal component biplot"),
        ("impute", "fill missing cells with column medians"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", type=Path, help="input CSV file")
        p.add_argument(
            "--estimator",
            choices=ESTIMATORS,
            default=None,
            help=f"covariance estimator (default: {DEFAULT_ESTIMATOR.get(name, '-')})",
        )
        p.add_argument(
            "--scale",
            choices=sorted(SCALES),
            default=None,
            help="robust scale for GK-family estimators "
            "(default: made; ogk defaults to tau)",
        )
        p.add_argument(
            "--h-fraction",
            type=float,
            default=0.5,
            help="MCD subset fraction in [0.5, 1.0] (default 0.5)",
        )
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help=f"RNG seed for MCD restarts (default: ${SEED_ENV_VAR} or 0)",
        )
        p.add_argument(
            "--coverage",
            default="0.95,0.99",
            help="comma-separated ellipse coverage levels (default 0.95,0.99)",
        )
        p.add_argument(
            "--cols",
            default=None,
            help="pair of column names for youden, e.g. --cols QC,RM",
        )
        p.add_argument(
            "--out", type=Path, default=Path("robcov_out"), help="output directory"
        )
        p.add_argument(
            "--format",
            default="csv,json,svg",
            help="subset of csv,json,svg to write",
        )
        p.add_argument(
            "--na-token",
            default=DEFAULT_NA_TOKEN,
            help='missing-value token in the input (default "NA")',
        )
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    estimator = args.estimator or DEFAULT_ESTIMATOR.get(args.command, "classical")
    if args.scale is not None:
        scale = SCALES[args.scale]
    elif estimator == "ogk":
        scale = TAU
    else:
        scale = MADE
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get(SEED_ENV_VAR, "")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise DataError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            ) from None
    try:
        coverage = tuple(float(c) for c in args.coverage.split(",") if c)
    except ValueError:
        raise DataError(f"bad --coverage value {args.coverage!r}") from None
    if not coverage or not all(0.0 < c < 1.0 for c in coverage):
        raise DataError("coverage levels must lie strictly between 0 and 1")
    formats = frozenset(f for f in args.format.split(",") if f)
    unknown = formats - {"csv", "json", "svg"}
    if unknown:
        raise DataError(f"unknown output formats: {', '.join(sorted(unknown))}")
    cols = None
    if args.cols:
        parts = tuple(c.strip() for c in args.cols.split(","))
        if len(parts) != 2 or not all(parts):
            raise DataError("--cols needs exactly two column names, e.g. A,B")
        cols = parts
    if not 0.5 <= args.h_fraction <= 1.0:
        raise DataError("--h-fraction must lie in [0.5, 1.0]")
    return RunConfig(
        command=args.command,
        input_path=args.input,
        estimator=estimator,
        scale=scale,
        coverage_levels=coverage,
        mcd=McdConfig(h_fraction=args.h_fraction, seed=seed),
        out_dir=args.out,
        formats=formats,
        cols=cols,
        na_token=args.na_token,
    )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        COMMANDS[cfg.command](cfg)
    except DataError as exc:
        print(f"robcov: error: {exc}", file=sys.stderr)
        return 2
    except EstimatorError as exc:
        print(f"robcov: estimator failure: {exc}", file=sys.stderr)
        return 3
    except RobcovError as exc:  # pragma: no cover - defensive
        print(f"robcov: error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

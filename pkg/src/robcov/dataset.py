"""Inter-laboratory data ingestion, median imputation, and bundled fixtures.

A :class:`DataMatrix` is a rectangular table of laboratory results: one row
per laboratory, one column per measurand. Missing cells are represented by
NaN inside the float array and are a distinct state, not a value; all
present cells must be finite. Instances are immutable and safe to share.

Two fixtures from a real drinking-water reference material certification
exercise are embedded verbatim: ``potassium`` (25 laboratories, two
materials) and ``eight_elements`` (29 laboratories, eight elements, with
eleven missing cells). The same tables ship as CSV files under ``data/``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

__all__ = [
    "DataMatrix",
    "ImputationRecord",
    "parse_csv",
    "to_csv",
    "impute_median",
    "fixture",
    "FIXTURE_NAMES",
]

# Hard cap on the per-column missing fraction accepted by impute_median;
# beyond this, replacement by a single default stops being an inspection
# aid and starts distorting the column.
MAX_MISSING_FRACTION = 0.25

DEFAULT_NA_TOKEN = "NA"


@dataclass(frozen=True)
class DataMatrix:
    """Immutable labelled numeric table with explicit missing cells.

    ``values`` is an (n, p) float64 array where NaN marks a missing cell.
    """

    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    values: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {a.shape}")
        n, p = a.shape
        if n < 1 or p < 1:
            raise DataError("matrix must have at least one row and one column")
        if len(self.row_ids) != n or len(self.col_ids) != p:
            raise DataError("label counts do not match the value array shape")
        if len(set(self.row_ids)) != n:
            raise DataError("duplicate row identifiers")
        if len(set(self.col_ids)) != p:
            raise DataError("duplicate column identifiers")
        if np.any(np.isinf(a)):
            raise DataError("cells must be finite (infinity is not a value)")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "values", a)
        object.__setattr__(self, "row_ids", tuple(self.row_ids))
        object.__setattr__(self, "col_ids", tuple(self.col_ids))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def n_missing(self) -> int:
        return int(self.missing_mask.sum())

    def column(self, col_id: str) -> np.ndarray:
        try:
            j = self.col_ids.index(col_id)
        except ValueError:
            raise DataError(f"unknown column {col_id!r}") from None
        return self.values[:, j]

    def row(self, row_id: str) -> np.ndarray:
        try:
            i = self.row_ids.index(row_id)
        except ValueError:
            raise DataError(f"unknown row {row_id!r}") from None
        return self.values[i, :]

    def select_columns(self, col_ids: list[str] | tuple[str, ...]) -> "DataMatrix":
        idx = []
        for c in col_ids:
            if c not in self.col_ids:
                raise DataError(f"unknown column {c!r}")
            idx.append(self.col_ids.index(c))
        return DataMatrix(self.row_ids, tuple(col_ids), self.values[:, idx])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DataMatrix):
            return NotImplemented
        return (
            self.row_ids == other.row_ids
            and self.col_ids == other.col_ids
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def __hash__(self) -> int:  # labels only; value arrays are not hashable
        return hash((self.row_ids, self.col_ids))


@dataclass(frozen=True)
class ImputationRecord:
    """Which cells were filled in, and with what value."""

    entries: tuple[tuple[str, str, float], ...]

    def __len__(self) -> int:
        return len(self.entries)


def parse_csv(text: str, na_token: str = DEFAULT_NA_TOKEN) -> DataMatrix:
    """Parse CSV text into a DataMatrix.

    The first row is a header (first cell names the ID column and is
    ignored); the first column of every data row is the row identifier.
    Cells equal to ``na_token`` become missing; anything else must parse as
    a finite decimal number. Ragged rows, duplicate identifiers, and
    header-only input are rejected.
    """
    rows = [r for r in csv.reader(io.StringIO(text))]
    rows = [r for r in rows if r]  # drop blank lines
    if len(rows) < 2:
        raise DataError("empty input: need a header row and at least one data row")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2:
        raise DataError("header must name at least one data column")
    col_ids = header[1:]
    width = len(header)
    row_ids: list[str] = []
    data: list[list[float]] = []
    for lineno, raw in enumerate(rows[1:], start=2):
        if len(raw) != width:
            raise DataError(
                f"line {lineno}: expected {width} cells, got {len(raw)} (ragged row)"
            )
        cells = [c.strip() for c in raw]
        row_ids.append(cells[0])
        parsed = []
        for col, cell in zip(col_ids, cells[1:]):
            if cell == na_token:
                parsed.append(math.nan)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"line {lineno}, column {col!r}: {cell!r} is not a number "
                    f"or the missing-value token {na_token!r}"
                ) from None
            if not math.isfinite(value):
                raise DataError(
                    f"line {lineno}, column {col!r}: non-finite value {cell!r}"
                )
            parsed.append(value)
        data.append(parsed)
    return DataMatrix(tuple(row_ids), tuple(col_ids), np.array(data, dtype=float))


def to_csv(
    m: DataMatrix,
    na_token: str = DEFAULT_NA_TOKEN,
    id_header: str = "Laboratory ID",
) -> str:
    """Serialize a DataMatrix to CSV text that parse_csv round-trips."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([id_header, *m.col_ids])
    for i, rid in enumerate(m.row_ids):
        cells = [
            na_token if math.isnan(v) else repr(float(v)) for v in m.values[i]
        ]
        writer.writerow([rid, *cells])
    return out.getvalue()


def impute_median(m: DataMatrix) -> tuple[DataMatrix, ImputationRecord]:
    """Replace each missing cell with the median of its column's present values.

    Inspection-grade single imputation. Columns that are entirely missing,
    or missing more than 25% of their cells, are rejected rather than
    silently degraded.
    """
    values = m.values.copy()
    mask = m.missing_mask
    # a single missing cell is always imputable, even in a tiny column
    allowed = max(1, int(MAX_MISSING_FRACTION * m.n))
    entries: list[tuple[str, str, float]] = []
    for j, col in enumerate(m.col_ids):
        col_mask = mask[:, j]
        n_miss = int(col_mask.sum())
        if n_miss == 0:
            continue
        if n_miss == m.n:
            raise DataError(f"column {col!r} is entirely missing")
        if n_miss > allowed:
            raise DataError(
                f"column {col!r} is missing {n_miss}/{m.n} cells, above the "
                f"{MAX_MISSING_FRACTION:.0%} imputation cap"
            )
        med = float(np.median(values[~col_mask, j]))
        values[col_mask, j] = med
        for i in np.flatnonzero(col_mask):
            entries.append((m.row_ids[i], col, med))
    # report entries in row-major order for stable output
    order = {rid: i for i, rid in enumerate(m.row_ids)}
    entries.sort(key=lambda e: (order[e[0]], m.col_ids.index(e[1])))
    return (
        DataMatrix(m.row_ids, m.col_ids, values),
        ImputationRecord(tuple(entries)),
    )


# ---------------------------------------------------------------------------
# Bundled fixtures (identical copies ship under data/ as CSV)
# ---------------------------------------------------------------------------

POTASSIUM_CSV = """\
Laboratory ID,QC,RM
Lab01,7.9367,5.1640
Lab02,9.3400,5.9400
Lab03,7.3969,4.7404
Lab04,7.6350,5.1580
Lab05,7.6700,4.9720
Lab06,8.2500,5.4080
Lab07,7.7600,5.0840
Lab08,8.2700,5.1900
Lab09,10.1200,6.5580
Lab11,7.9900,5.1620
Lab12,7.9300,5.0980
Lab13,8.7933,5.7520
Lab14,7.8533,4.9440
Lab16,7.8500,5.4060
Lab18,7.6600,4.7000
Lab19,7.7800,5.1800
Lab20,9.0600,5.1960
Lab21,7.6191,4.9121
Lab22,7.4167,4.7480
Lab23,8.1000,5.2800
Lab25,7.8700,5.1660
Lab26,9.0858,5.7634
Lab27,6.7433,3.8200
Lab28,7.8167,4.9400
Lab29,5.2550,7.7900
"""

EIGHT_ELEMENTS_CSV = """\
Laboratory ID,Arsenic,Cadmium,Chromium,Copper,Lead,Manganese,Nickel,Zinc
Lab1,10.014,5.0900,48.084,2016.0,25.290,50.632,19.740,613.44
Lab2,10.288,4.9880,48.166,1936.4,24.240,47.246,19.214,634.52
Lab3,10.166,4.9719,47.373,1682.4,22.893,48.073,18.525,598.21
Lab4,9.096,4.4700,44.382,1882.2,21.202,44.310,19.568,551.14
Lab5,10.004,4.8880,49.654,1970.8,23.976,48.100,19.624,607.57
Lab6,10.440,4.9560,49.820,1900.0,22.560,48.700,18.520,654.20
Lab7,10.342,4.9220,50.368,1938.3,23.256,49.020,19.944,620.32
Lab8,10.474,4.8440,45.712,2068.2,23.670,46.668,20.616,625.04
Lab9,30.916,4.6120,44.742,1959.9,26.592,47.654,20.340,582.48
Lab10,10.120,3.9580,54.480,2048.0,19.060,51.620,NA,578.00
Lab11,10.700,4.9800,48.540,2013.8,26.520,45.300,19.880,626.06
Lab12,9.876,4.8220,46.086,1827.1,23.780,48.072,18.740,608.12
Lab13,10.440,5.1020,51.160,2026.0,24.920,50.500,18.340,603.20
Lab14,10.412,4.8580,49.300,1845.2,22.494,47.460,18.288,554.12
Lab15,10.200,4.8960,48.960,1956.2,NA,48.376,19.528,NA
Lab16,9.603,4.9120,47.108,2225.2,24.710,49.298,17.432,592.26
Lab17,9.934,4.8220,50.520,2096.0,22.260,49.700,17.580,556.80
Lab18,10.502,4.8616,47.556,1830.5,22.870,46.106,19.528,597.31
Lab19,9.942,4.8120,47.182,1686.8,24.706,43.656,19.184,556.13
Lab20,9.534,4.9180,47.916,1803.7,24.950,53.564,20.032,564.96
Lab21,10.362,4.7042,51.594,2054.7,24.047,50.012,19.823,633.50
Lab22,10.314,4.9660,52.684,1938.2,23.550,49.774,20.840,586.24
Lab23,NA,6.0000,48.200,1886.0,30.000,47.800,0.000,620.60
Lab24,10.180,4.8520,47.740,2040.0,23.040,46.720,19.320,NA
Lab25,10.054,4.9660,46.266,1893.2,24.262,51.548,19.628,590.62
Lab26,9.794,5.2200,55.467,2019.0,23.160,51.945,21.162,663.69
Lab27,NA,NA,NA,1865.2,22.026,45.982,18.806,559.93
Lab28,5.342,NA,45.660,1906.4,NA,40.862,NA,607.51
Lab29,12.420,6.0300,55.033,1888.7,30.013,50.173,19.977,589.88
"""

_FIXTURES = {
    "potassium": POTASSIUM_CSV,
    "eight_elements": EIGHT_ELEMENTS_CSV,
}

FIXTURE_NAMES = tuple(sorted(_FIXTURES))


def fixture(name: str) -> DataMatrix:
    """Return one of the bundled certification-study tables by name."""
    try:
        text = _FIXTURES[name]
    except KeyError:
        raise DataError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        ) from None
    return parse_csv(text)

"""Ingestion of the three external time series (workload, carbon intensity,
weather) and alignment onto the simulation step grid.

All loaders expect one year of hourly data (8760 rows). Hourly values are
expanded to the step grid with a piecewise-constant hold, and forecast
windows wrap cyclically around the year.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataFormatError, DataValidationError, DomainError

HOURS_PER_YEAR = 8760

CI_COLUMNS = ["timestamp", "WND", "SUN", "WAT", "OIL", "NG", "COL", "NUC", "OTH", "avg_CI"]

EPW_HEADER_LINES = 8
EPW_DRY_BULB_FIELD = 6   # 0-based; field 7 of the record
EPW_REL_HUM_FIELD = 8    # 0-based; field 9 of the record
EPW_DRY_BULB_MISSING = 99.9
EPW_REL_HUM_MISSING = 999.0


@dataclass
class HourlySeries:
    """One year of hourly values for a single external variable.

    Attributes:
        name: Series label ("cpu_load", "avg_CI", "dry_bulb", "rel_humidity").
        values: 8760 floats, one per hour of the year.
        units: Unit label for the values.
        metadata: Optional per-series extras (e.g. CI source-mix columns).
        warnings: Flagged-but-carried records, e.g. EPW missing-value sentinels.
    """

    name: str
    values: list
    units: str
    metadata: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)


def load_workload(path) -> HourlySeries:
    """Parse a workload trace CSV: an unnamed index column, then `cpu_load`.

    Args:
        path: CSV file with 8760 data rows of CPU load fractions in [0, 1].

    Returns:
        HourlySeries of load fractions, row order preserved.

    Raises:
        DataFormatError: Wrong header or wrong row count.
        DataValidationError: Value outside [0, 1] or non-finite, citing the
            1-based data row.
    """
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise DataFormatError(f"{path}: not parseable as CSV ({exc})") from exc
    if len(df.columns) != 2 or df.columns[1] != "cpu_load":
        raise DataFormatError(
            f"{path}: expected an unnamed index column followed by 'cpu_load', "
            f"got columns {list(df.columns)}"
        )
    if not df.columns[0].startswith("Unnamed"):
        raise DataFormatError(f"{path}: first column must be unnamed, got '{df.columns[0]}'")
    if len(df) != HOURS_PER_YEAR:
        raise DataFormatError(f"{path}: expected {HOURS_PER_YEAR} rows, got {len(df)}")
    values = df["cpu_load"].to_numpy(dtype=float)
    _check_finite(values, path)
    bad = np.nonzero((values < 0.0) | (values > 1.0))[0]
    if bad.size:
        row = int(bad[0]) + 1
        raise DataValidationError(
            f"cpu_load value {values[bad[0]]} outside [0, 1]", row=row
        )
    return HourlySeries("cpu_load", values.tolist(), "fraction")


def load_ci(path) -> HourlySeries:
    """Parse a grid carbon-intensity CSV with the fixed source-mix layout.

    The header must be exactly
    ``timestamp,WND,SUN,WAT,OIL,NG,COL,NUC,OTH,avg_CI``. The returned series
    holds the avg_CI column; the source-mix columns are kept as metadata.
    """
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise DataFormatError(f"{path}: not parseable as CSV ({exc})") from exc
    if list(df.columns) != CI_COLUMNS:
        raise DataFormatError(
            f"{path}: expected columns {CI_COLUMNS}, got {list(df.columns)}"
        )
    if len(df) != HOURS_PER_YEAR:
        raise DataFormatError(f"{path}: expected {HOURS_PER_YEAR} rows, got {len(df)}")
    values = df["avg_CI"].to_numpy(dtype=float)
    _check_finite(values, path)
    bad = np.nonzero(values < 0.0)[0]
    if bad.size:
        raise DataValidationError(
            f"avg_CI value {values[bad[0]]} must be >= 0", row=int(bad[0]) + 1
        )
    metadata = {c: df[c].tolist() for c in CI_COLUMNS if c != "avg_CI"}
    return HourlySeries("avg_CI", values.tolist(), "gCO2/kWh", metadata=metadata)


def load_weather(path):
    """Parse an EPW weather file into dry-bulb and relative-humidity series.

    The file must carry 8 header lines followed by 8760 comma-separated data
    records; dry-bulb temperature is field 7 and relative humidity field 9
    (1-indexed) of each record. Missing-value sentinels (99.9 dry-bulb,
    999 RH) are carried through but flagged in the series' warnings list.

    Returns:
        (dry_bulb, rel_humidity) HourlySeries pair.
    """
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    records = [ln for ln in lines[EPW_HEADER_LINES:] if ln.strip()]
    if len(lines) < EPW_HEADER_LINES or len(records) != HOURS_PER_YEAR:
        raise DataFormatError(
            f"{path}: expected {HOURS_PER_YEAR} data records after "
            f"{EPW_HEADER_LINES} header lines, got {len(records)}"
        )
    dry, rh = [], []
    dry_warn, rh_warn = [], []
    for i, rec in enumerate(records):
        fields = rec.split(",")
        if len(fields) <= EPW_REL_HUM_FIELD:
            raise DataFormatError(
                f"{path}: record {i + 1} has {len(fields)} fields, "
                f"need at least {EPW_REL_HUM_FIELD + 1}"
            )
        try:
            t = float(fields[EPW_DRY_BULB_FIELD])
            h = float(fields[EPW_REL_HUM_FIELD])
        except ValueError as exc:
            raise DataFormatError(f"{path}: record {i + 1}: non-numeric field ({exc})") from exc
        if t == EPW_DRY_BULB_MISSING:
            dry_warn.append(f"record {i + 1}: dry-bulb missing-value sentinel 99.9")
        if h == EPW_REL_HUM_MISSING:
            rh_warn.append(f"record {i + 1}: relative-humidity missing-value sentinel 999")
        dry.append(t)
        rh.append(h)
    return (
        HourlySeries("dry_bulb", dry, "degC", warnings=dry_warn),
        HourlySeries("rel_humidity", rh, "%", warnings=rh_warn),
    )


# Magnus coefficients (saturation vapor pressure over water) and the
# ventilated-psychrometer coefficient at standard pressure.
_MAGNUS_A = 611.2
_MAGNUS_B = 17.62
_MAGNUS_C = 243.12
_PSYCHRO_AP = 6.60e-4 * 101325.0  # Pa/K


def _saturation_vapor_pressure(t):
    return _MAGNUS_A * math.exp(_MAGNUS_B * t / (_MAGNUS_C + t))


def wet_bulb_temp(t_db, rh):
    """Wet-bulb temperature from dry-bulb (degC) and relative humidity (%).

    Solves the psychrometer equation es(tw) - A*P*(t_db - tw) = e by
    bisection, with Magnus saturation vapor pressure. Strictly monotone
    non-decreasing in rh, never exceeds the dry-bulb, and equals it at
    saturation.

    Raises:
        DomainError: rh outside [0, 100].
    """
    if not 0.0 <= rh <= 100.0:
        raise DomainError(f"relative humidity {rh} outside [0, 100]")
    vapor = rh / 100.0 * _saturation_vapor_pressure(t_db)

    def residual(tw):
        return _saturation_vapor_pressure(tw) - _PSYCHRO_AP * (t_db - tw) - vapor

    if residual(t_db) <= 0.0:
        return t_db
    lo, hi = t_db - 120.0, t_db
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def resample_to_steps(series, steps_per_hour):
    """Expand hourly values onto the step grid by piecewise-constant hold.

    Each hourly value is repeated steps_per_hour times, so hourly energy
    totals stay exact under the expansion.
    """
    if steps_per_hour < 1:
        raise DomainError(f"steps_per_hour must be >= 1, got {steps_per_hour}")
    values = series.values if isinstance(series, HourlySeries) else series
    return np.repeat(np.asarray(values, dtype=float), steps_per_hour).tolist()


def forecast_window(series, t, length):
    """Values at steps t..t+length inclusive, wrapping cyclically at year end.

    Always returns length+1 values regardless of t.
    """
    if t < 0:
        raise DomainError(f"step index must be >= 0, got {t}")
    if length < 0:
        raise DomainError(f"window length must be >= 0, got {length}")
    values = series.values if isinstance(series, HourlySeries) else series
    n = len(values)
    return [values[(t + i) % n] for i in range(length + 1)]


@dataclass
class SeriesBundle:
    """Step-grid aligned workload, CI, and weather series for one scenario.

    All series share the same length (8760 x steps_per_hour). The wet-bulb
    series is derived pointwise from dry-bulb and relative humidity, with RH
    clamped into [0, 100] first (EPW permits supersaturated readings).
    """

    workload: list
    ci: list
    dry_bulb: list
    rel_humidity: list
    wet_bulb: list
    steps_per_hour: int
    ci_max: float = 0.0
    ci_normalized: list = field(default_factory=list)

    def __post_init__(self):
        n = HOURS_PER_YEAR * self.steps_per_hour
        for label, series in (
            ("workload", self.workload),
            ("ci", self.ci),
            ("dry_bulb", self.dry_bulb),
            ("rel_humidity", self.rel_humidity),
            ("wet_bulb", self.wet_bulb),
        ):
            if len(series) != n:
                raise DataFormatError(
                    f"bundle series '{label}' has {len(series)} steps, expected {n}"
                )
        for wb, db in zip(self.wet_bulb, self.dry_bulb):
            if wb > db:
                raise DataValidationError(f"wet-bulb {wb} exceeds dry-bulb {db}")
        self.ci_max = max(self.ci)
        scale = self.ci_max if self.ci_max > 0 else 1.0
        self.ci_normalized = [v / scale for v in self.ci]

    def __len__(self):
        return len(self.workload)


def build_bundle(workload, ci, dry_bulb, rel_humidity, steps_per_hour) -> SeriesBundle:
    """Resample hourly series to the step grid and derive wet-bulb."""
    wb_hourly = [
        wet_bulb_temp(t, min(100.0, max(0.0, h)))
        for t, h in zip(dry_bulb.values, rel_humidity.values)
    ]
    return SeriesBundle(
        workload=resample_to_steps(workload, steps_per_hour),
        ci=resample_to_steps(ci, steps_per_hour),
        dry_bulb=resample_to_steps(dry_bulb, steps_per_hour),
        rel_humidity=resample_to_steps(rel_humidity, steps_per_hour),
        wet_bulb=resample_to_steps(wb_hourly, steps_per_hour),
        steps_per_hour=steps_per_hour,
    )


def load_bundle(workload_path, ci_path, weather_path, steps_per_hour) -> SeriesBundle:
    """Load all three external files and align them onto the step grid."""
    workload = load_workload(workload_path)
    ci = load_ci(ci_path)
    dry, rh = load_weather(weather_path)
    return build_bundle(workload, ci, dry, rh, steps_per_hour)


def _check_finite(values, path):
    if not np.all(np.isfinite(values)):
        row = int(np.nonzero(~np.isfinite(values))[0][0]) + 1
        raise DataValidationError(f"{path}: non-finite value", row=row)

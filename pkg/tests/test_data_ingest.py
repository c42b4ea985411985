import random

import pytest

from dcsim import (forecast_window, load_ci, load_weather, load_workload,
                   resample_to_steps, wet_bulb_temp)
from dcsim.data_ingest import HOURS_PER_YEAR, HourlySeries
from dcsim.errors import DataFormatError, DataValidationError, DomainError

CI_HEADER = "timestamp,WND,SUN,WAT,OIL,NG,COL,NUC,OTH,avg_CI"


def write_workload_csv(path, rows):
    lines = [",cpu_load"] + [f"{i + 1},{v}" for i, v in enumerate(rows)]
    path.write_text("\n".join(lines) + "\n")


def padded(prefix, fill="0.500"):
    return list(prefix) + [fill] * (HOURS_PER_YEAR - len(prefix))


def write_epw(path, records, headers=8):
    lines = [f"HEADER LINE {i}" for i in range(headers)] + records
    path.write_text("\n".join(lines) + "\n")


def epw_record(dry, rh):
    return f"2022,1,1,1,0,SYN,{dry},1.0,{rh},101325"


class TestLoadWorkload:
    def test_excerpt_rows_parse_exactly(self, tmp_path):
        p = tmp_path / "w.csv"
        write_workload_csv(p, padded(["0.380", "0.434", "0.402", "0.485"]))
        series = load_workload(p)
        assert series.values[:4] == [0.380, 0.434, 0.402, 0.485]
        assert len(series) == HOURS_PER_YEAR

    def test_all_zero_trace(self, tmp_path):
        p = tmp_path / "w.csv"
        write_workload_csv(p, ["0.0"] * HOURS_PER_YEAR)
        assert set(load_workload(p).values) == {0.0}

    def test_out_of_range_cites_row(self, tmp_path):
        p = tmp_path / "w.csv"
        write_workload_csv(p, padded(["0.380", "0.434", "0.402", "0.485", "1.2"]))
        with pytest.raises(DataValidationError, match="row 5"):
            load_workload(p)

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "w.csv"
        p.write_text(",cpu load\n" + "\n".join(f"{i},0.5" for i in range(HOURS_PER_YEAR)) + "\n")
        with pytest.raises(DataFormatError):
            load_workload(p)

    def test_wrong_row_count(self, tmp_path):
        p = tmp_path / "w.csv"
        write_workload_csv(p, ["0.5"] * (HOURS_PER_YEAR - 1))
        with pytest.raises(DataFormatError, match="8760"):
            load_workload(p)


class TestLoadCI:
    def test_excerpt_rows_parse_exactly(self, tmp_path):
        p = tmp_path / "ci.csv"
        rows = [
            "2022-01-01 00:00:00+00:00,1251,0,3209,0,15117,2365,4992,337,367.450",
            "2022-01-01 01:00:00+00:00,1270,0,3022,0,15035,2013,4993,311,363.434",
        ]
        fill = "2022-01-01 02:00:00+00:00,1,0,1,0,1,1,1,1,350.0"
        p.write_text("\n".join([CI_HEADER] + rows + [fill] * (HOURS_PER_YEAR - 2)) + "\n")
        series = load_ci(p)
        assert series.values[0] == 367.450
        assert series.values[1] == 363.434
        assert series.metadata["WND"][0] == 1251

    def test_misspelled_avg_ci_column(self, tmp_path):
        p = tmp_path / "ci.csv"
        p.write_text(CI_HEADER.replace("avg_CI", "avgCI") + "\n"
                     + "\n".join(["2022,1,1,1,1,1,1,1,1,350.0"] * HOURS_PER_YEAR) + "\n")
        with pytest.raises(DataFormatError):
            load_ci(p)

    def test_negative_ci_rejected(self, tmp_path):
        p = tmp_path / "ci.csv"
        fill = "2022-01-01 00:00:00+00:00,1,0,1,0,1,1,1,1,350.0"
        bad = fill.replace("350.0", "-1.0")
        p.write_text("\n".join([CI_HEADER, bad] + [fill] * (HOURS_PER_YEAR - 1)) + "\n")
        with pytest.raises(DataValidationError, match="row 1"):
            load_ci(p)


class TestLoadWeather:
    def test_constant_synthetic_epw(self, tmp_path):
        p = tmp_path / "w.epw"
        write_epw(p, [epw_record("20.0", "50")] * HOURS_PER_YEAR)
        dry, rh = load_weather(p)
        assert set(dry.values) == {20.0}
        assert set(rh.values) == {50.0}
        assert dry.warnings == [] and rh.warnings == []

    def test_missing_value_sentinel_flagged(self, tmp_path):
        p = tmp_path / "w.epw"
        records = [epw_record("20.0", "50")] * HOURS_PER_YEAR
        records[3] = epw_record("99.9", "50")
        write_epw(p, records)
        dry, _ = load_weather(p)
        assert dry.values[3] == 99.9  # carried through
        assert len(dry.warnings) == 1 and "record 4" in dry.warnings[0]

    def test_truncated_file_reports_count(self, tmp_path):
        p = tmp_path / "w.epw"
        write_epw(p, [epw_record("20.0", "50")] * (HOURS_PER_YEAR - 1))
        with pytest.raises(DataFormatError, match="8759"):
            load_weather(p)

    def test_short_record_rejected(self, tmp_path):
        p = tmp_path / "w.epw"
        records = [epw_record("20.0", "50")] * HOURS_PER_YEAR
        records[0] = "2022,1,1,1,0,SYN,20.0"
        write_epw(p, records)
        with pytest.raises(DataFormatError, match="record 1"):
            load_weather(p)


class TestWetBulb:
    def test_saturation_equals_dry_bulb(self):
        assert wet_bulb_temp(20.0, 100.0) == pytest.approx(20.0, abs=0.2)
        assert wet_bulb_temp(20.0, 100.0) <= 20.0

    def test_psychrometric_reference_points(self):
        # Bands cross-checked against a standard psychrometric calculator;
        # tight values pin the implementation against drift.
        assert wet_bulb_temp(20.0, 50.0) == pytest.approx(13.7, abs=0.5)
        assert wet_bulb_temp(20.0, 50.0) == pytest.approx(13.836475945432497, rel=1e-9)
        assert wet_bulb_temp(35.0, 20.0) == pytest.approx(19.0, abs=1.0)
        assert wet_bulb_temp(35.0, 20.0) == pytest.approx(19.002151079554665, rel=1e-9)

    def test_monotone_in_humidity(self):
        for t_db in (-5.0, 0.0, 10.0, 20.0, 35.0):
            previous = -1e9
            for rh in range(0, 101, 5):
                wb = wet_bulb_temp(t_db, float(rh))
                assert wb >= previous - 1e-12
                assert wb <= t_db
                previous = wb

    def test_domain_error(self):
        with pytest.raises(DomainError):
            wet_bulb_temp(20.0, 101.0)
        with pytest.raises(DomainError):
            wet_bulb_temp(20.0, -0.1)


class TestResample:
    def test_hold_semantics(self):
        assert resample_to_steps([1.0, 2.0], 4) == [1.0] * 4 + [2.0] * 4

    def test_identity(self):
        assert resample_to_steps([7.0], 1) == [7.0]

    def test_sum_scales_by_steps(self):
        rng = random.Random(7)
        values = [rng.random() for _ in range(100)]
        out = resample_to_steps(values, 3)
        assert sum(out) == pytest.approx(3 * sum(values), rel=1e-12)
        assert len(out) == 300

    def test_bad_steps(self):
        with pytest.raises(DomainError):
            resample_to_steps([1.0], 0)


class TestForecastWindow:
    def test_basic(self):
        assert forecast_window([1, 2, 3, 4, 5], 1, 2) == [2, 3, 4]

    def test_wraps_at_end(self):
        assert forecast_window([1, 2, 3, 4, 5], 4, 1) == [5, 1]

    def test_degenerate(self):
        assert forecast_window([1, 2, 3], 1, 0) == [2]

    def test_length_always_l_plus_one(self):
        series = list(range(10))
        for t in (0, 3, 9, 15, 123):
            for length in (0, 1, 9, 25):
                assert len(forecast_window(series, t, length)) == length + 1


class TestFixtureIngestion:
    def test_workload_lossless_reemission(self, ny_scenario):
        series = load_workload(ny_scenario.workload_path)
        with open(ny_scenario.workload_path) as fh:
            lines = fh.read().splitlines()[1:]
        emitted = [f"{i + 1},{v:.3f}" for i, v in enumerate(series.values)]
        assert emitted == lines

    def test_ci_lossless_reemission(self, ny_scenario):
        series = load_ci(ny_scenario.ci_path)
        with open(ny_scenario.ci_path) as fh:
            lines = fh.read().splitlines()[1:]
        file_col = [ln.rsplit(",", 1)[1] for ln in lines]
        assert [f"{v:.3f}" for v in series.values] == file_col

    def test_weather_lossless_reemission(self, ny_scenario):
        dry, rh = load_weather(ny_scenario.weather_path)
        with open(ny_scenario.weather_path) as fh:
            lines = fh.read().splitlines()[8:]
        dry_col = [ln.split(",")[6] for ln in lines]
        rh_col = [ln.split(",")[8] for ln in lines]
        assert [f"{v:.1f}" for v in dry.values] == dry_col
        assert [f"{v:.0f}" for v in rh.values] == rh_col

    def test_bundle_invariants(self, ny_bundle):
        n = HOURS_PER_YEAR * ny_bundle.steps_per_hour
        assert len(ny_bundle) == n
        assert all(w <= d for w, d in zip(ny_bundle.wet_bulb, ny_bundle.dry_bulb))
        assert ny_bundle.ci_max == max(ny_bundle.ci)
        assert max(ny_bundle.ci_normalized) == 1.0


def test_bundle_rejects_mismatched_lengths():
    from dcsim.data_ingest import SeriesBundle
    ok = [0.0] * (HOURS_PER_YEAR * 2)
    with pytest.raises(DataFormatError, match="workload"):
        SeriesBundle(workload=ok[:-1], ci=ok, dry_bulb=ok, rel_humidity=ok,
                     wet_bulb=ok, steps_per_hour=2)


def test_hourly_series_len():
    s = HourlySeries("x", [1.0, 2.0], "u")
    assert len(s) == 2

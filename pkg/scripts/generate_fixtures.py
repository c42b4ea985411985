"""Generate the synthetic year-long fixture files under fixtures/.

Deterministic closed-form traces: a diurnal+weekly workload pattern, a
carbon-intensity sinusoid with a +/-50% swing around its mean, and a mild
diurnal+seasonal weather cycle. Values are rounded to the same precision the
file formats carry, so ingestion round-trips bit-exactly.
"""

import json
import math
import os

HOURS = 8760
OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")

DAYS_IN_MONTH = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def month_day(day_of_year):
    d = day_of_year
    for month, n in enumerate(DAYS_IN_MONTH, start=1):
        if d < n:
            return month, d + 1
        d -= n
    raise ValueError(day_of_year)


def workload(h):
    hod = h % 24
    how = h % 168
    v = 0.45 + 0.2 * math.sin(2 * math.pi * (hod - 14) / 24) \
        + 0.05 * math.sin(2 * math.pi * how / 168)
    return min(0.95, max(0.05, v))


def carbon_intensity(h):
    hod = h % 24
    return 350.0 * (1.0 + 0.5 * math.sin(2 * math.pi * (hod - 10) / 24))


def dry_bulb(h):
    hod = h % 24
    doy = h // 24
    return (22.0 + 6.0 * math.sin(2 * math.pi * (hod - 15) / 24)
            + 4.0 * math.sin(2 * math.pi * doy / 365 - math.pi / 2))


def rel_humidity(h):
    hod = h % 24
    return 55.0 - 15.0 * math.sin(2 * math.pi * (hod - 15) / 24)


def write_workload(path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",cpu_load\n")
        for h in range(HOURS):
            fh.write(f"{h + 1},{workload(h):.3f}\n")


def write_ci(path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp,WND,SUN,WAT,OIL,NG,COL,NUC,OTH,avg_CI\n")
        for h in range(HOURS):
            doy = h // 24
            month, day = month_day(doy)
            ts = f"2022-{month:02d}-{day:02d} {h % 24:02d}:00:00+00:00"
            ci = carbon_intensity(h)
            wnd = int(1200 + 600 * math.sin(2 * math.pi * (h % 24) / 24))
            sun = max(0, int(900 * math.sin(math.pi * ((h % 24) - 6) / 12))) \
                if 6 <= h % 24 <= 18 else 0
            ng = int(14000 + 3000 * math.sin(2 * math.pi * ((h % 24) - 10) / 24))
            fh.write(f"{ts},{wnd},{sun},3000,0,{ng},2200,4990,320,{ci:.3f}\n")


def write_epw(path):
    header = [
        "LOCATION,Synthetic Fixture City,XX,SYN,Custom,000000,40.00,-74.00,0.0,10.0",
        "DESIGN CONDITIONS,0",
        "TYPICAL/EXTREME PERIODS,0",
        "GROUND TEMPERATURES,0",
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
        "COMMENTS 1,Synthetic deterministic trace for repository fixtures",
        "COMMENTS 2,Dry-bulb field 7 and relative humidity field 9 are meaningful",
        "DATA PERIODS,1,1,Data,Sunday,1/1,12/31",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(line + "\n")
        for h in range(HOURS):
            doy = h // 24
            month, day = month_day(doy)
            t = dry_bulb(h)
            rh = rel_humidity(h)
            dew = t - (100.0 - rh) / 5.0
            fh.write(
                f"2022,{month},{day},{h % 24 + 1},0,SYN,"
                f"{t:.1f},{dew:.1f},{rh:.0f},101325\n"
            )


SCENARIOS = {
    # 7 simulated days each; all share the same year-long data files.
    "ny_7day.json": {
        "experiment": {
            "workload_path": "workload.csv",
            "ci_path": "ci.csv",
            "weather_path": "weather.epw",
            "horizon_steps": 672,
            "start_step": 0,
        },
    },
    "summer_7day.json": {
        "experiment": {
            "workload_path": "workload.csv",
            "ci_path": "ci.csv",
            "weather_path": "weather.epw",
            "horizon_steps": 672,
            "start_step": 17472,  # day 182
            "reward_alpha": 1.0,
            "battery_initial_soc": 0.0,
            "setpoint_initial": 21.0,
        },
    },
    "flex_7day.json": {
        "experiment": {
            "workload_path": "workload.csv",
            "ci_path": "ci.csv",
            "weather_path": "weather.epw",
            "horizon_steps": 672,
            "start_step": 9600,  # day 100
            "flexible_ratio": 0.3,
            "forecast_len": 12,
            "queue_max": 300.0,
            "reward_alpha": 0.5,
            "battery": {"capacity_kwh": 400.0, "p_charge_max_kw": 150.0,
                        "p_discharge_max_kw": 150.0},
        },
    },
}


def main():
    os.makedirs(OUT, exist_ok=True)
    write_workload(os.path.join(OUT, "workload.csv"))
    write_ci(os.path.join(OUT, "ci.csv"))
    write_epw(os.path.join(OUT, "weather.epw"))
    for name, body in SCENARIOS.items():
        with open(os.path.join(OUT, name), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(body, fh, indent=2)
            fh.write("\n")
    print(f"fixtures written to {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()

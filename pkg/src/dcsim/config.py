"""Scenario configuration: parsing, validation, defaults, serialization.

A scenario file is JSON with four sections. Three mirror the plant
configuration schema with its upper-case key names verbatim
(``data_center_configuration``, ``hvac_configuration``,
``server_characteristics``); the fourth, ``experiment``, carries
scenario-level settings (data paths, horizon, reward weights, battery).
Every field has a built-in default, so a file needs to state only what it
overrides. Unknown sections and unknown keys inside known sections are
preserved and exposed generically, and survive a dump/load round trip.

Configs are immutable after load and safe to share across episode runners.
"""

import json
import os
from dataclasses import dataclass, field

from .battery import BatteryParams
from .errors import ConfigError, ConfigParseError


def _as_float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError(f"expected a number, got {v!r}")
    return float(v)


def _as_int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"expected an integer, got {v!r}")
    return v


def _as_bool(v):
    if not isinstance(v, bool):
        raise TypeError(f"expected a boolean, got {v!r}")
    return v


def _as_float_tuple(v):
    return tuple(_as_float(x) for x in v)


def _as_pair(v):
    t = _as_float_tuple(v)
    if len(t) != 2:
        raise TypeError(f"expected a pair, got {v!r}")
    return t


def _as_pair_list(v):
    return tuple(_as_pair(x) for x in v)


def _as_opt_path(v):
    if v is None:
        return None
    if not isinstance(v, str):
        raise TypeError(f"expected a path string, got {v!r}")
    return v


@dataclass(frozen=True)
class DCPhysicalConfig:
    """Physical plant description: room geometry, HVAC chain, server curves."""

    num_rows: int = 4
    num_racks_per_row: int = 5
    rack_supply_approach_temp: tuple = (5.3,) * 5 + (5.0,) * 10 + (5.3,) * 5
    rack_return_approach_temp: tuple = (-3.7,) * 5 + (-2.5,) * 10 + (-3.7,) * 5
    cpus_per_rack: int = 200

    c_air: float = 1006.0
    rho_air: float = 1.225
    crac_supply_air_flow_rate_pu: float = 0.00005663
    crac_reference_air_flow_rate_pu: float = 0.00009438
    crac_fan_ref_p: float = 150.0
    chiller_cop_base: float = 5.0
    chiller_cop_k: float = 0.1
    chiller_cop_t_nominal: float = 25.0
    ct_fan_ref_p: float = 1000.0
    ct_reference_air_flow_rate: float = 2.8315
    cw_pressure_drop: float = 300000.0
    cw_water_flow_rate: float = 0.0011
    cw_pump_efficiency: float = 0.87
    ct_pressure_drop: float = 300000.0
    ct_water_flow_rate: float = 0.0011
    ct_pump_efficiency: float = 0.87
    ct_drift_rate: float = 0.002
    include_pump_power: bool = True
    include_crac_fan_power: bool = True

    cpu_power_ratio_lb: tuple = (0.01, 1.00)
    cpu_power_ratio_ub: tuple = (0.03, 1.02)
    it_fan_airflow_ratio_lb: tuple = (0.01, 0.225)
    it_fan_airflow_ratio_ub: tuple = (0.225, 1.0)
    it_fan_full_load_v: float = 0.051
    itfan_ref_v_ratio: float = 1.0
    itfan_ref_p: float = 10.0
    inlet_temp_range: tuple = (16.0, 28.0)
    # Per-rack (full_load_W, idle_W) pairs; a single pair applies to all racks.
    server_power_characteristics: tuple = (
        (170.0, 20.0), (120.0, 10.0), (130.0, 10.0), (130.0, 10.0), (130.0, 10.0),
        (130.0, 10.0), (130.0, 10.0), (130.0, 10.0), (130.0, 10.0), (130.0, 10.0),
        (130.0, 10.0), (130.0, 10.0), (130.0, 10.0), (130.0, 10.0), (170.0, 10.0),
        (130.0, 10.0), (130.0, 10.0), (110.0, 10.0), (170.0, 10.0), (170.0, 10.0),
    )

    @property
    def num_racks(self):
        return self.num_rows * self.num_racks_per_row

    @property
    def total_cpus(self):
        return self.num_racks * self.cpus_per_rack

    def rack_power_pairs(self):
        """(full_load_W, idle_W) per rack, replicating a single default pair."""
        chars = self.server_power_characteristics
        if chars and isinstance(chars[0], (int, float)):
            chars = (tuple(chars),)
        if len(chars) == 1:
            return tuple(chars) * self.num_racks
        return tuple(chars)

    def validate(self):
        n = self.num_racks
        if self.num_rows < 1 or self.num_racks_per_row < 1 or self.cpus_per_rack < 1:
            raise ConfigError("data_center_configuration", "row/rack/CPU counts must be >= 1")
        for name, lst in (
            ("RACK_SUPPLY_APPROACH_TEMP_LIST", self.rack_supply_approach_temp),
            ("RACK_RETURN_APPROACH_TEMP_LIST", self.rack_return_approach_temp),
        ):
            if len(lst) != n:
                raise ConfigError(
                    f"data_center_configuration.{name}",
                    f"length {len(lst)} != NUM_ROWS*NUM_RACKS_PER_ROW = {n}",
                )
        for name, v in (
            ("C_AIR", self.c_air),
            ("RHO_AIR", self.rho_air),
            ("CRAC_SUPPLY_AIR_FLOW_RATE_pu", self.crac_supply_air_flow_rate_pu),
            ("CRAC_REFERENCE_AIR_FLOW_RATE_pu", self.crac_reference_air_flow_rate_pu),
            ("CRAC_FAN_REF_P", self.crac_fan_ref_p),
            ("CHILLER_COP_BASE", self.chiller_cop_base),
            ("CT_FAN_REF_P", self.ct_fan_ref_p),
            ("CT_REFERENCE_AIR_FLOW_RATE", self.ct_reference_air_flow_rate),
            ("CW_WATER_FLOW_RATE", self.cw_water_flow_rate),
            ("CT_WATER_FLOW_RATE", self.ct_water_flow_rate),
        ):
            if not v > 0:
                raise ConfigError(f"hvac_configuration.{name}", "must be > 0")
        for name, v in (
            ("CW_PUMP_EFFICIENCY", self.cw_pump_efficiency),
            ("CT_PUMP_EFFICIENCY", self.ct_pump_efficiency),
        ):
            if not 0.0 < v <= 1.0:
                raise ConfigError(f"hvac_configuration.{name}", "must be in (0, 1]")
        if self.ct_drift_rate < 0:
            raise ConfigError("hvac_configuration.CT_DRIFT_RATE", "must be >= 0")
        if not self.inlet_temp_range[0] < self.inlet_temp_range[1]:
            raise ConfigError("server_characteristics.INLET_TEMP_RANGE", "min must be < max")
        for name, v in (
            ("ITFAN_REF_P", self.itfan_ref_p),
            ("ITFAN_REF_V_RATIO", self.itfan_ref_v_ratio),
            ("IT_FAN_FULL_LOAD_V", self.it_fan_full_load_v),
        ):
            if not v > 0:
                raise ConfigError(f"server_characteristics.{name}", "must be > 0")
        chars = self.server_power_characteristics
        if chars and isinstance(chars[0], (int, float)):
            chars = (tuple(chars),)
        if len(chars) not in (1, n):
            raise ConfigError(
                "server_characteristics.DEFAULT_SERVER_POWER_CHARACTERISTICS",
                f"need 1 default pair or one pair per rack ({n}), got {len(chars)}",
            )
        for pair in chars:
            if len(pair) != 2 or pair[0] <= 0 or pair[1] < 0:
                raise ConfigError(
                    "server_characteristics.DEFAULT_SERVER_POWER_CHARACTERISTICS",
                    f"each entry must be [full_load_W > 0, idle_W >= 0], got {list(pair)}",
                )
        return self


@dataclass(frozen=True)
class RewardSelection:
    """Registered reward-function name per agent."""

    ls: str = "default_ls_reward"
    dc: str = "default_dc_reward"
    bat: str = "default_bat_reward"


@dataclass(frozen=True)
class ScenarioConfig:
    """Full experiment description: plant, data paths, horizon, rewards."""

    plant: DCPhysicalConfig = field(default_factory=DCPhysicalConfig)
    workload_path: str = None
    ci_path: str = None
    weather_path: str = None
    steps_per_hour: int = 4
    horizon_steps: int = 2976
    start_step: int = 0
    flexible_ratio: float = 0.1
    forecast_len: int = 16
    queue_max: float = 500.0
    reward_alpha: float = 0.8
    reward_names: RewardSelection = field(default_factory=RewardSelection)
    seed: int = 0
    setpoint_bounds: tuple = (16.0, 23.0)
    setpoint_increment: float = 1.0
    setpoint_initial: float = 18.0
    battery_initial_soc: float = 0.5
    battery: BatteryParams = field(default_factory=BatteryParams)
    extras: dict = field(default_factory=dict)

    @property
    def dt_hours(self):
        return 1.0 / self.steps_per_hour

    @property
    def steps_per_day(self):
        return 24 * self.steps_per_hour

    def validate(self):
        self.plant.validate()
        self.battery.validate("experiment.battery")
        if self.steps_per_hour < 1:
            raise ConfigError("experiment.steps_per_hour", "must be >= 1")
        if self.horizon_steps <= 0:
            raise ConfigError("experiment.horizon_steps", "must be > 0")
        if self.start_step < 0:
            raise ConfigError("experiment.start_step", "must be >= 0")
        if not 0.0 < self.flexible_ratio < 1.0:
            raise ConfigError("experiment.flexible_ratio", "must be in (0, 1)")
        if self.forecast_len < 1:
            raise ConfigError("experiment.forecast_len", "must be >= 1")
        if not self.queue_max > 0:
            raise ConfigError("experiment.queue_max", "must be > 0")
        if not 0.0 <= self.reward_alpha <= 1.0:
            raise ConfigError("experiment.reward_alpha", "must be in [0, 1]")
        lo, hi = self.setpoint_bounds
        ilo, ihi = self.plant.inlet_temp_range
        if not lo < hi:
            raise ConfigError("experiment.setpoint_bounds", "min must be < max")
        if lo < ilo or hi > ihi:
            raise ConfigError(
                "experiment.setpoint_bounds",
                f"[{lo}, {hi}] must lie within INLET_TEMP_RANGE [{ilo}, {ihi}]",
            )
        if not self.setpoint_increment > 0:
            raise ConfigError("experiment.setpoint_increment", "must be > 0")
        if not lo <= self.setpoint_initial <= hi:
            raise ConfigError("experiment.setpoint_initial", "must lie within setpoint_bounds")
        if not 0.0 <= self.battery_initial_soc <= 1.0:
            raise ConfigError("experiment.battery_initial_soc", "must be in [0, 1]")
        return self

    def to_dict(self):
        """Canonical nested-dict form, suitable for JSON round-tripping."""
        p = self.plant
        out = {
            "data_center_configuration": {
                "NUM_ROWS": p.num_rows,
                "NUM_RACKS_PER_ROW": p.num_racks_per_row,
                "RACK_SUPPLY_APPROACH_TEMP_LIST": list(p.rack_supply_approach_temp),
                "RACK_RETURN_APPROACH_TEMP_LIST": list(p.rack_return_approach_temp),
                "CPUS_PER_RACK": p.cpus_per_rack,
            },
            "hvac_configuration": {
                "C_AIR": p.c_air,
                "RHO_AIR": p.rho_air,
                "CRAC_SUPPLY_AIR_FLOW_RATE_pu": p.crac_supply_air_flow_rate_pu,
                "CRAC_REFERENCE_AIR_FLOW_RATE_pu": p.crac_reference_air_flow_rate_pu,
                "CRAC_FAN_REF_P": p.crac_fan_ref_p,
                "CHILLER_COP_BASE": p.chiller_cop_base,
                "CHILLER_COP_K": p.chiller_cop_k,
                "CHILLER_COP_T_NOMINAL": p.chiller_cop_t_nominal,
                "CT_FAN_REF_P": p.ct_fan_ref_p,
                "CT_REFERENCE_AIR_FLOW_RATE": p.ct_reference_air_flow_rate,
                "CW_PRESSURE_DROP": p.cw_pressure_drop,
                "CW_WATER_FLOW_RATE": p.cw_water_flow_rate,
                "CW_PUMP_EFFICIENCY": p.cw_pump_efficiency,
                "CT_PRESSURE_DROP": p.ct_pressure_drop,
                "CT_WATER_FLOW_RATE": p.ct_water_flow_rate,
                "CT_PUMP_EFFICIENCY": p.ct_pump_efficiency,
                "CT_DRIFT_RATE": p.ct_drift_rate,
                "INCLUDE_PUMP_POWER": p.include_pump_power,
                "INCLUDE_CRAC_FAN_POWER": p.include_crac_fan_power,
            },
            "server_characteristics": {
                "CPU_POWER_RATIO_LB": list(p.cpu_power_ratio_lb),
                "CPU_POWER_RATIO_UB": list(p.cpu_power_ratio_ub),
                "IT_FAN_AIRFLOW_RATIO_LB": list(p.it_fan_airflow_ratio_lb),
                "IT_FAN_AIRFLOW_RATIO_UB": list(p.it_fan_airflow_ratio_ub),
                "IT_FAN_FULL_LOAD_V": p.it_fan_full_load_v,
                "ITFAN_REF_V_RATIO": p.itfan_ref_v_ratio,
                "ITFAN_REF_P": p.itfan_ref_p,
                "INLET_TEMP_RANGE": list(p.inlet_temp_range),
                "DEFAULT_SERVER_POWER_CHARACTERISTICS": [
                    list(pair) for pair in p.server_power_characteristics
                ],
            },
            "experiment": {
                "workload_path": self.workload_path,
                "ci_path": self.ci_path,
                "weather_path": self.weather_path,
                "steps_per_hour": self.steps_per_hour,
                "horizon_steps": self.horizon_steps,
                "start_step": self.start_step,
                "flexible_ratio": self.flexible_ratio,
                "forecast_len": self.forecast_len,
                "queue_max": self.queue_max,
                "reward_alpha": self.reward_alpha,
                "reward_names": {
                    "ls": self.reward_names.ls,
                    "dc": self.reward_names.dc,
                    "bat": self.reward_names.bat,
                },
                "seed": self.seed,
                "setpoint_bounds": list(self.setpoint_bounds),
                "setpoint_increment": self.setpoint_increment,
                "setpoint_initial": self.setpoint_initial,
                "battery_initial_soc": self.battery_initial_soc,
                "battery": {
                    "capacity_kwh": self.battery.capacity_kwh,
                    "eta_charge": self.battery.eta_charge,
                    "eta_discharge": self.battery.eta_discharge,
                    "p_charge_max_kw": self.battery.p_charge_max_kw,
                    "p_discharge_max_kw": self.battery.p_discharge_max_kw,
                    "rate_cap_u": self.battery.rate_cap_u,
                    "rate_cap_v": self.battery.rate_cap_v,
                },
            },
        }
        for section, extra in self.extras.items():
            if section == "experiment.battery":
                out["experiment"]["battery"] = {**out["experiment"]["battery"], **extra}
            elif section in out:
                out[section] = {**out[section], **extra}
            else:
                out[section] = extra
        return out

    def to_json_text(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


# (json key, dataclass field, converter) per section; anything else is an extra.
_DC_KEYS = (
    ("NUM_ROWS", "num_rows", _as_int),
    ("NUM_RACKS_PER_ROW", "num_racks_per_row", _as_int),
    ("RACK_SUPPLY_APPROACH_TEMP_LIST", "rack_supply_approach_temp", _as_float_tuple),
    ("RACK_RETURN_APPROACH_TEMP_LIST", "rack_return_approach_temp", _as_float_tuple),
    ("CPUS_PER_RACK", "cpus_per_rack", _as_int),
)
_HVAC_KEYS = (
    ("C_AIR", "c_air", _as_float),
    ("RHO_AIR", "rho_air", _as_float),
    ("CRAC_SUPPLY_AIR_FLOW_RATE_pu", "crac_supply_air_flow_rate_pu", _as_float),
    ("CRAC_REFERENCE_AIR_FLOW_RATE_pu", "crac_reference_air_flow_rate_pu", _as_float),
    ("CRAC_FAN_REF_P", "crac_fan_ref_p", _as_float),
    ("CHILLER_COP_BASE", "chiller_cop_base", _as_float),
    ("CHILLER_COP_K", "chiller_cop_k", _as_float),
    ("CHILLER_COP_T_NOMINAL", "chiller_cop_t_nominal", _as_float),
    ("CT_FAN_REF_P", "ct_fan_ref_p", _as_float),
    ("CT_REFERENCE_AIR_FLOW_RATE", "ct_reference_air_flow_rate", _as_float),
    ("CW_PRESSURE_DROP", "cw_pressure_drop", _as_float),
    ("CW_WATER_FLOW_RATE", "cw_water_flow_rate", _as_float),
    ("CW_PUMP_EFFICIENCY", "cw_pump_efficiency", _as_float),
    ("CT_PRESSURE_DROP", "ct_pressure_drop", _as_float),
    ("CT_WATER_FLOW_RATE", "ct_water_flow_rate", _as_float),
    ("CT_PUMP_EFFICIENCY", "ct_pump_efficiency", _as_float),
    ("CT_DRIFT_RATE", "ct_drift_rate", _as_float),
    ("INCLUDE_PUMP_POWER", "include_pump_power", _as_bool),
    ("INCLUDE_CRAC_FAN_POWER", "include_crac_fan_power", _as_bool),
)
_SERVER_KEYS = (
    ("CPU_POWER_RATIO_LB", "cpu_power_ratio_lb", _as_pair),
    ("CPU_POWER_RATIO_UB", "cpu_power_ratio_ub", _as_pair),
    ("IT_FAN_AIRFLOW_RATIO_LB", "it_fan_airflow_ratio_lb", _as_pair),
    ("IT_FAN_AIRFLOW_RATIO_UB", "it_fan_airflow_ratio_ub", _as_pair),
    ("IT_FAN_FULL_LOAD_V", "it_fan_full_load_v", _as_float),
    ("ITFAN_REF_V_RATIO", "itfan_ref_v_ratio", _as_float),
    ("ITFAN_REF_P", "itfan_ref_p", _as_float),
    ("INLET_TEMP_RANGE", "inlet_temp_range", _as_pair),
    ("DEFAULT_SERVER_POWER_CHARACTERISTICS", "server_power_characteristics", _as_pair_list),
)
_EXPERIMENT_KEYS = (
    ("workload_path", "workload_path", _as_opt_path),
    ("ci_path", "ci_path", _as_opt_path),
    ("weather_path", "weather_path", _as_opt_path),
    ("steps_per_hour", "steps_per_hour", _as_int),
    ("horizon_steps", "horizon_steps", _as_int),
    ("start_step", "start_step", _as_int),
    ("flexible_ratio", "flexible_ratio", _as_float),
    ("forecast_len", "forecast_len", _as_int),
    ("queue_max", "queue_max", _as_float),
    ("reward_alpha", "reward_alpha", _as_float),
    ("seed", "seed", _as_int),
    ("setpoint_bounds", "setpoint_bounds", _as_pair),
    ("setpoint_increment", "setpoint_increment", _as_float),
    ("setpoint_initial", "setpoint_initial", _as_float),
    ("battery_initial_soc", "battery_initial_soc", _as_float),
)
_BATTERY_KEYS = (
    ("capacity_kwh", _as_float),
    ("eta_charge", _as_float),
    ("eta_discharge", _as_float),
    ("p_charge_max_kw", _as_float),
    ("p_discharge_max_kw", _as_float),
    ("rate_cap_u", _as_float),
    ("rate_cap_v", _as_float),
)

_PLANT_SECTIONS = {
    "data_center_configuration": _DC_KEYS,
    "hvac_configuration": _HVAC_KEYS,
    "server_characteristics": _SERVER_KEYS,
}


def _consume(section_name, data, keymap, out_fields, extras):
    extra = {}
    known = {k for k, *_ in keymap}
    for json_key, field_name, conv in keymap:
        if json_key in data:
            try:
                out_fields[field_name] = conv(data[json_key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{section_name}.{json_key}", str(exc)) from exc
    for k, v in data.items():
        if k not in known:
            extra[k] = v
    if extra:
        extras[section_name] = extra


def scenario_from_dict(data, base_dir=None) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a nested dict, merged over defaults."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "scenario must be a JSON object")
    plant_fields, scen_fields, extras = {}, {}, {}
    for section, keymap in _PLANT_SECTIONS.items():
        body = data.get(section, {})
        if not isinstance(body, dict):
            raise ConfigError(section, "must be a JSON object")
        _consume(section, body, keymap, plant_fields, extras)
    exp = data.get("experiment", {})
    if not isinstance(exp, dict):
        raise ConfigError("experiment", "must be a JSON object")
    _consume("experiment", {k: v for k, v in exp.items() if k not in ("battery", "reward_names")},
             _EXPERIMENT_KEYS, scen_fields, extras)
    bat_fields = {}
    bat = exp.get("battery", {})
    bat_known = {key for key, _ in _BATTERY_KEYS}
    for key, conv in _BATTERY_KEYS:
        if key in bat:
            try:
                bat_fields[key] = conv(bat[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"experiment.battery.{key}", str(exc)) from exc
    bat_extra = {k: v for k, v in bat.items() if k not in bat_known}
    if bat_extra:
        extras["experiment.battery"] = bat_extra
    rn = exp.get("reward_names", {})
    reward_names = RewardSelection(
        ls=rn.get("ls", RewardSelection.ls),
        dc=rn.get("dc", RewardSelection.dc),
        bat=rn.get("bat", RewardSelection.bat),
    )
    for section, body in data.items():
        if section not in _PLANT_SECTIONS and section != "experiment":
            extras[section] = body

    for path_field in ("workload_path", "ci_path", "weather_path"):
        p = scen_fields.get(path_field)
        if p is not None and base_dir is not None and not os.path.isabs(p):
            scen_fields[path_field] = os.path.normpath(os.path.join(base_dir, p))

    cfg = ScenarioConfig(
        plant=DCPhysicalConfig(**plant_fields),
        reward_names=reward_names,
        battery=BatteryParams(**bat_fields),
        extras=extras,
        **scen_fields,
    )
    return cfg.validate()


def load_scenario(path) -> ScenarioConfig:
    """Load, merge over defaults, and validate a scenario file.

    Relative data paths are resolved against the scenario file's directory.

    Raises:
        ConfigParseError: malformed JSON, with the offending line.
        ConfigError: a field violates its documented domain.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(path, f"cannot read file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(path, exc.msg, line=exc.lineno) from exc
    return scenario_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def default_scenario() -> ScenarioConfig:
    """The built-in default scenario (no data paths attached)."""
    return ScenarioConfig().validate()

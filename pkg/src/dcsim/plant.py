"""IT electrical load, the HVAC cooling chain, and cooling-tower water use.

One step is a steady-state pass through the chain: rack inlet temperatures
follow from the CRAC setpoint plus per-rack approach offsets; CPU and IT-fan
power follow from two-stage linear interpolation over (load, inlet temp);
rack outlets and the averaged CRAC return temperature close the air loop;
the return-to-setpoint difference drives the CRAC cooling load, chiller,
cooling-tower fan (cube-law), and pumps.

CPU/fan curves: the lower/upper ratio pairs give the curve endpoints at zero
and full load; each endpoint is interpolated across the admissible inlet
temperature band (clamped), then the two are interpolated over load. This
keeps power monotone in both load and inlet temperature.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import SingularityError

COOLING_CAPACITY_MARGIN = 1.1
COP_FLOOR = 1.0
# Cooling-tower approach (K) vs ambient dry-bulb; floored so cold weather
# cannot drive the required tower airflow to infinity.
CT_DELTA_SLOPE = 0.2
CT_DELTA_OFFSET = 2.0
CT_DELTA_FLOOR = 2.0


class DCAction(IntEnum):
    DECREASE = 0
    MAINTAIN = 1
    INCREASE = 2


@dataclass
class PlantState:
    """CRAC setpoint plus the previous step's results (for observations)."""

    setpoint: float
    last_e_hvac: float = 0.0
    last_e_it: float = 0.0
    last_return_temp: float = 0.0
    last_room_temp: float = 0.0
    last_water: float = 0.0


@dataclass
class StepPowerBreakdown:
    """All per-step power terms (W), temperatures (degC), and water (liters).

    Identities: p_datacenter = p_cpu_total + p_itfan_total and
    p_hvac = p_ct + p_chiller + p_pumps, exactly.
    """

    p_cpu_total: float
    p_itfan_total: float
    p_datacenter: float
    p_crac_fan: float
    p_cool: float
    p_chiller: float
    p_ct: float
    p_pumps: float
    p_hvac: float
    t_return: float
    t_room: float
    water_liters: float


def inlet_temps(setpoint, supply_approach):
    """Per-rack inlet temperatures: setpoint plus each approach offset."""
    return np.asarray(supply_approach, dtype=float) + setpoint


def _two_stage_ratio(inlet, load, lb, ub, inlet_range):
    lo, hi = inlet_range
    x = np.clip((np.asarray(inlet, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    at_zero_load = lb[0] + (ub[0] - lb[0]) * x
    at_full_load = lb[1] + (ub[1] - lb[1]) * x
    return at_zero_load + (at_full_load - at_zero_load) * load


def cpu_power(inlet, load, full_load_power, idle_power, ratio_lb, ratio_ub,
              inlet_temp_range, cpus_per_rack):
    """CPU block power per rack (W), floored at the rack idle power."""
    ratio = _two_stage_ratio(inlet, load, ratio_lb, ratio_ub, inlet_temp_range)
    per_cpu = np.maximum(ratio * np.asarray(full_load_power, dtype=float),
                         np.asarray(idle_power, dtype=float))
    return per_cpu * cpus_per_rack


def itfan_power(inlet, load, airflow_ratio_lb, airflow_ratio_ub, inlet_temp_range,
                full_load_v, ref_v_ratio, ref_p, cpus_per_rack):
    """IT fan power (W, cube-law) and airflow (m3/s) per rack."""
    v_ratio = _two_stage_ratio(inlet, load, airflow_ratio_lb, airflow_ratio_ub,
                               inlet_temp_range)
    power = ref_p * (v_ratio / ref_v_ratio) ** 3 * cpus_per_rack
    airflow = v_ratio * full_load_v * cpus_per_rack
    return power, airflow


def outlet_temps(inlet, rack_powers, airflow, c_air, rho_air):
    """Per-rack outlet temperatures from the rack heat and its airflow."""
    inlet = np.asarray(inlet, dtype=float)
    rack_powers = np.asarray(rack_powers, dtype=float)
    airflow = np.asarray(airflow, dtype=float)
    dead = airflow <= 0.0
    if np.any(dead & (rack_powers > 0.0)):
        raise SingularityError("nonzero rack power with zero airflow")
    delta = np.divide(rack_powers, c_air * rho_air * airflow,
                      out=np.zeros_like(rack_powers), where=~dead)
    return inlet + delta


def crac_return_temp(outlets, return_approach):
    """CRAC return temperature: mean of outlet-plus-approach across racks."""
    return float(np.mean(np.asarray(outlets, dtype=float)
                         + np.asarray(return_approach, dtype=float)))


def chiller_cop(t_db, cfg):
    """Ambient-dependent chiller COP, linear in dry-bulb and floored at 1."""
    return max(COP_FLOOR, cfg.chiller_cop_base
               - cfg.chiller_cop_k * (t_db - cfg.chiller_cop_t_nominal))


def cooling_tower_delta(t_db):
    return max(CT_DELTA_FLOOR, CT_DELTA_SLOPE * t_db + CT_DELTA_OFFSET)


def pump_power(cfg):
    """Combined hydraulic power of the chilled- and condenser-water pumps (W)."""
    if not cfg.include_pump_power:
        return 0.0
    cw = cfg.cw_pressure_drop * cfg.cw_water_flow_rate / cfg.cw_pump_efficiency
    ct = cfg.ct_pressure_drop * cfg.ct_water_flow_rate / cfg.ct_pump_efficiency
    return cw + ct


def hvac_chain(t_return, setpoint, t_db, cfg, max_cooling_cap=None):
    """Cooling-side powers for one step.

    Returns:
        (p_cool, p_chiller, p_ct, p_pumps, p_hvac) in watts. p_cool is
        clamped to [0, max_cooling_cap].
    """
    if max_cooling_cap is None:
        max_cooling_cap = size_cooling(cfg)
    m_crac_fan = cfg.rho_air * cfg.crac_supply_air_flow_rate_pu * cfg.total_cpus
    p_cool = m_crac_fan * cfg.c_air * (t_return - setpoint)
    p_cool = min(max(0.0, p_cool), max_cooling_cap)
    cop = chiller_cop(t_db, cfg)
    p_chiller = p_cool * (1.0 + 1.0 / cop)
    v_ct = p_chiller / (cfg.c_air * cfg.rho_air * cooling_tower_delta(t_db))
    p_ct = cfg.ct_fan_ref_p * (v_ct / cfg.ct_reference_air_flow_rate) ** 3
    p_pumps = pump_power(cfg)
    return p_cool, p_chiller, p_ct, p_pumps, p_ct + p_chiller + p_pumps


def size_cooling(cfg):
    """Maximum cooling capacity (W): peak IT power plus a 10% margin.

    Peak IT power is evaluated at full load with every rack inlet at the top
    of the admissible inlet range; the result depends only on the config.
    """
    pairs = cfg.rack_power_pairs()
    full = np.array([p[0] for p in pairs])
    idle = np.array([p[1] for p in pairs])
    inlet = np.full(cfg.num_racks, cfg.inlet_temp_range[1], dtype=float)
    p_cpu = cpu_power(inlet, 1.0, full, idle, cfg.cpu_power_ratio_lb,
                      cfg.cpu_power_ratio_ub, cfg.inlet_temp_range, cfg.cpus_per_rack)
    p_fan, _ = itfan_power(inlet, 1.0, cfg.it_fan_airflow_ratio_lb,
                           cfg.it_fan_airflow_ratio_ub, cfg.inlet_temp_range,
                           cfg.it_fan_full_load_v, cfg.itfan_ref_v_ratio,
                           cfg.itfan_ref_p, cfg.cpus_per_rack)
    return COOLING_CAPACITY_MARGIN * float(np.sum(p_cpu) + np.sum(p_fan))


def water_usage(t_return, setpoint, wet_bulb, drift_rate, steps_per_hour):
    """Cooling-tower water use for one step, in liters.

    The normalized hourly use is 0.044*wet_bulb + 0.35*range + 0.1 with
    range = t_return - setpoint; the evaporative part is floored at zero and
    drift losses are added on top, then converted to liters per step.
    """
    range_temp = t_return - setpoint
    norm = 0.044 * wet_bulb + 0.35 * range_temp + 0.1
    usage = max(0.0, norm) + norm * drift_rate
    return usage * 1000.0 / steps_per_hour


class PlantModel:
    """Precomputed per-rack arrays and sizing for fast per-step evaluation."""

    def __init__(self, cfg, setpoint_bounds=(16.0, 23.0), setpoint_increment=1.0):
        self.cfg = cfg
        self.setpoint_bounds = setpoint_bounds
        self.setpoint_increment = setpoint_increment
        pairs = cfg.rack_power_pairs()
        self.full_load_power = np.array([p[0] for p in pairs])
        self.idle_power = np.array([p[1] for p in pairs])
        self.supply_approach = np.asarray(cfg.rack_supply_approach_temp, dtype=float)
        self.return_approach = np.asarray(cfg.rack_return_approach_temp, dtype=float)
        self.max_cooling_cap = size_cooling(cfg)
        self.p_crac_fan = cfg.crac_fan_ref_p if cfg.include_crac_fan_power else 0.0

    def apply_action(self, setpoint, action):
        delta = (int(DCAction(action)) - 1) * self.setpoint_increment
        lo, hi = self.setpoint_bounds
        return min(hi, max(lo, setpoint + delta))

    def evaluate(self, setpoint, load, t_db, wet_bulb, steps_per_hour):
        """Run the full chain at a fixed setpoint; returns a StepPowerBreakdown."""
        cfg = self.cfg
        inlet = inlet_temps(setpoint, self.supply_approach)
        p_cpu = cpu_power(inlet, load, self.full_load_power, self.idle_power,
                          cfg.cpu_power_ratio_lb, cfg.cpu_power_ratio_ub,
                          cfg.inlet_temp_range, cfg.cpus_per_rack)
        p_fan, airflow = itfan_power(inlet, load, cfg.it_fan_airflow_ratio_lb,
                                     cfg.it_fan_airflow_ratio_ub, cfg.inlet_temp_range,
                                     cfg.it_fan_full_load_v, cfg.itfan_ref_v_ratio,
                                     cfg.itfan_ref_p, cfg.cpus_per_rack)
        rack_power = p_cpu + p_fan
        outlets = outlet_temps(inlet, rack_power, airflow, cfg.c_air, cfg.rho_air)
        t_return = crac_return_temp(outlets, self.return_approach)
        p_cool, p_chiller, p_ct, p_pumps, p_hvac = hvac_chain(
            t_return, setpoint, t_db, cfg, self.max_cooling_cap)
        water = water_usage(t_return, setpoint, wet_bulb, cfg.ct_drift_rate,
                            steps_per_hour)
        return StepPowerBreakdown(
            p_cpu_total=float(np.sum(p_cpu)),
            p_itfan_total=float(np.sum(p_fan)),
            p_datacenter=float(np.sum(rack_power)),
            p_crac_fan=self.p_crac_fan,
            p_cool=p_cool,
            p_chiller=p_chiller,
            p_ct=p_ct,
            p_pumps=p_pumps,
            p_hvac=p_hvac,
            t_return=t_return,
            t_room=float(np.mean(outlets)),
            water_liters=water,
        )


def step_dc(state, action, b_hat, t_db, wet_bulb, model, dt_hours):
    """Apply a setpoint action and run one plant step.

    Returns:
        (e_hvac_kwh, e_it_kwh, new_state, breakdown). IT energy includes the
        fixed-speed CRAC fan when the config enables it.
    """
    setpoint = model.apply_action(state.setpoint, action)
    steps_per_hour = 1.0 / dt_hours
    bd = model.evaluate(setpoint, b_hat, t_db, wet_bulb, steps_per_hour)
    e_hvac = bd.p_hvac * dt_hours / 1000.0
    e_it = (bd.p_datacenter + bd.p_crac_fan) * dt_hours / 1000.0
    new_state = PlantState(
        setpoint=setpoint,
        last_e_hvac=e_hvac,
        last_e_it=e_it,
        last_return_temp=bd.t_return,
        last_room_temp=bd.t_room,
        last_water=bd.water_liters,
    )
    return e_hvac, e_it, new_state, bd

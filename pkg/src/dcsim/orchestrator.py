"""Episode orchestration: wiring of the three environments, carbon
accounting, rewards, and the episode runner.

Per step, the environments run in a fixed cascade: load shifting first
(producing the executed load), then the plant (producing HVAC and IT
energy), then the battery (producing the signed grid energy). The step
carbon footprint is (E_it + E_hvac + E_bat) * CI / 1000 in kg.

Observation layouts are fixed and versioned (OBSERVATION_LAYOUT_VERSION) so
adapters and golden traces stay stable:

    agent_ls : [sin h, cos h, sin d, cos d, load, queue/queue_max,
                CI window (L+1, / trace max), battery SoC]
    agent_dc : [sin h, cos h, sin d, cos d, dry-bulb, room temp,
                prev E_hvac, prev E_it, CI window (L+1, / trace max)]
    agent_bat: [sin h, cos h, sin d, cos d, prev DC energy (kWh), SoC,
                CI window (L+1, / trace max)]
"""

from dataclasses import dataclass

from .battery import BatteryState, step_battery
from .data_ingest import forecast_window, load_bundle
from .errors import ConfigError, ContractError, DomainError
from .plant import PlantModel, PlantState, pump_power, step_dc
from .rewards import resolve
from .workload import WorkloadState, _time_features, observe_ls, step_workload

OBSERVATION_LAYOUT_VERSION = "1"

AGENT_LS = "agent_ls"
AGENT_DC = "agent_dc"
AGENT_BAT = "agent_bat"
AGENT_IDS = (AGENT_LS, AGENT_DC, AGENT_BAT)

# Feature indices controllers rely on.
DC_OBS_T_ROOM = 5
BAT_OBS_SOC = 5
LS_OBS_CI_START = 6
DC_OBS_CI_START = 8
BAT_OBS_CI_START = 6


@dataclass(frozen=True)
class JointAction:
    ls: int
    dc: int
    bat: int


@dataclass
class StepRecord:
    """Everything produced by one joint step, in trace-column order."""

    t: int
    b_t: float
    b_hat: float
    e_it: float
    e_hvac: float
    e_bat: float
    ci: float
    cfp_kg: float
    water_liters: float
    queue: float
    dropped: float
    r_ls: float
    r_dc: float
    r_bat: float
    mixed_r_ls: float
    mixed_r_dc: float
    mixed_r_bat: float
    setpoint: float
    soc: float

    def to_dict(self):
        return {c: getattr(self, c) for c in TRACE_COLUMNS}


TRACE_COLUMNS = [
    "t", "b_t", "b_hat", "e_it", "e_hvac", "e_bat", "ci", "cfp_kg",
    "water_liters", "queue", "dropped", "r_ls", "r_dc", "r_bat",
    "mixed_r_ls", "mixed_r_dc", "mixed_r_bat", "setpoint", "soc",
]


@dataclass(frozen=True)
class RewardBounds:
    """Normalization constants shared by the default reward functions."""

    dcload_min: float
    dcload_max: float
    ci_max: float
    steps_per_hour: int

    def validate(self):
        if not self.dcload_max > self.dcload_min:
            raise DomainError(
                f"degenerate dc-load bounds [{self.dcload_min}, {self.dcload_max}]"
            )
        return self


def reward_params(record, bounds):
    """Flat parameter map for the reward registry, from one step record."""
    return {
        "bat_total_energy_with_battery_KWh": record.e_it + record.e_hvac + record.e_bat,
        "norm_CI": record.ci / bounds.ci_max if bounds.ci_max > 0 else 0.0,
        "bat_dcload_min": bounds.dcload_min,
        "bat_dcload_max": bounds.dcload_max,
        "bat_CO2_footprint": record.cfp_kg,
        "dc_hvac_energy_KWh": record.e_hvac,
        "dc_it_energy_KWh": record.e_it,
        "dc_water_usage_liters": record.water_liters,
        "ls_tasks_dropped": record.dropped,
        "ls_tasks_in_queue": record.queue,
        "ls_current_hour": record.t,
        "ls_steps_per_hour": bounds.steps_per_hour,
    }


def default_rewards(record, bounds):
    """The default per-agent reward triple (r_ls, r_dc, r_bat)."""
    bounds.validate()
    params = reward_params(record, bounds)
    return (
        resolve("default_ls_reward").fn(params),
        resolve("default_dc_reward").fn(params),
        resolve("default_bat_reward").fn(params),
    )


def mix_rewards(rewards, alpha):
    """Collaborative mixing: own reward weighted alpha, the others (1-alpha)/2.

    Each output row's weights sum to 1; alpha = 1 is the identity.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha {alpha} outside [0, 1]")
    r_ls, r_dc, r_bat = rewards
    share = (1.0 - alpha) / 2.0
    return (
        alpha * r_ls + share * r_dc + share * r_bat,
        share * r_ls + alpha * r_dc + share * r_bat,
        share * r_ls + share * r_dc + alpha * r_bat,
    )


class World:
    """Mutable simulation state for one episode. One instance per episode."""

    def __init__(self, scenario, bundle=None):
        scenario.validate()
        if bundle is None:
            for name in ("workload_path", "ci_path", "weather_path"):
                if getattr(scenario, name) is None:
                    raise ConfigError(f"experiment.{name}", "required to run an episode")
            bundle = load_bundle(scenario.workload_path, scenario.ci_path,
                                 scenario.weather_path, scenario.steps_per_hour)
        self.scenario = scenario
        self.bundle = bundle
        self.model = PlantModel(scenario.plant, scenario.setpoint_bounds,
                                scenario.setpoint_increment)
        self.reward_specs = {
            "ls": resolve(scenario.reward_names.ls),
            "dc": resolve(scenario.reward_names.dc),
            "bat": resolve(scenario.reward_names.bat),
        }
        cfg = scenario.plant
        idle_floor = sum(p[1] for p in cfg.rack_power_pairs()) * cfg.cpus_per_rack
        p_min = idle_floor + pump_power(cfg) + self.model.p_crac_fan
        self.bounds = RewardBounds(
            dcload_min=p_min * scenario.dt_hours / 1000.0,
            dcload_max=self.model.max_cooling_cap * scenario.dt_hours / 1000.0,
            ci_max=bundle.ci_max,
            steps_per_hour=scenario.steps_per_hour,
        ).validate()
        self.reset()

    def reset(self, start_step=None):
        s = self.scenario
        self.t = s.start_step if start_step is None else start_step
        self.step_count = 0
        self.workload_state = WorkloadState(step_in_day=self.t % s.steps_per_day)
        initial_room = s.setpoint_initial + float(
            sum(s.plant.rack_supply_approach_temp) / len(s.plant.rack_supply_approach_temp))
        self.plant_state = PlantState(setpoint=s.setpoint_initial,
                                      last_room_temp=initial_room)
        self.battery_state = BatteryState(
            stored_kwh=s.battery_initial_soc * s.battery.capacity_kwh)
        return self

    @property
    def done(self):
        return self.step_count >= self.scenario.horizon_steps

    def _series(self, name):
        return getattr(self.bundle, name)[self.t % len(self.bundle)]

    def observations(self):
        """Per-agent observation vectors for the current step (pure)."""
        s = self.scenario
        t = self.t
        soc = self.battery_state.soc(s.battery)
        obs_ls = observe_ls(self.workload_state, t, self.bundle, soc,
                            s.queue_max, s.forecast_len)
        ci_window = forecast_window(self.bundle.ci_normalized, t, s.forecast_len)
        time_feats = _time_features(t, s.steps_per_hour)
        ps = self.plant_state
        obs_dc = time_feats + [self._series("dry_bulb"), ps.last_room_temp,
                               ps.last_e_hvac, ps.last_e_it] + ci_window
        obs_bat = time_feats + [ps.last_e_hvac + ps.last_e_it, soc] + ci_window
        return {AGENT_LS: obs_ls, AGENT_DC: obs_dc, AGENT_BAT: obs_bat}

    def step(self, actions: JointAction) -> StepRecord:
        if self.done:
            raise ContractError("step() called on a finished episode")
        s = self.scenario
        t = self.t
        b_t = self._series("workload")
        ci = self._series("ci")
        t_db = self._series("dry_bulb")
        wet_bulb = self._series("wet_bulb")

        b_hat, new_ws = step_workload(
            self.workload_state, actions.ls, b_t, s.flexible_ratio,
            c_max=1.0, queue_max=s.queue_max, steps_per_day=s.steps_per_day)
        e_hvac, e_it, new_ps, bd = step_dc(
            self.plant_state, actions.dc, b_hat, t_db, wet_bulb,
            self.model, s.dt_hours)
        new_bs, e_bat = step_battery(
            self.battery_state, actions.bat, s.battery, s.dt_hours)
        cfp = (e_it + e_hvac + e_bat) * ci / 1000.0

        record = StepRecord(
            t=t, b_t=b_t, b_hat=b_hat, e_it=e_it, e_hvac=e_hvac, e_bat=e_bat,
            ci=ci, cfp_kg=cfp, water_liters=bd.water_liters,
            queue=new_ws.queue, dropped=new_ws.dropped_this_step,
            r_ls=0.0, r_dc=0.0, r_bat=0.0,
            mixed_r_ls=0.0, mixed_r_dc=0.0, mixed_r_bat=0.0,
            setpoint=new_ps.setpoint, soc=new_bs.soc(s.battery),
        )
        params = reward_params(record, self.bounds)
        r = (self.reward_specs["ls"].fn(params),
             self.reward_specs["dc"].fn(params),
             self.reward_specs["bat"].fn(params))
        mixed = mix_rewards(r, s.reward_alpha)
        record.r_ls, record.r_dc, record.r_bat = r
        record.mixed_r_ls, record.mixed_r_dc, record.mixed_r_bat = mixed

        self.workload_state = new_ws
        self.plant_state = new_ps
        self.battery_state = new_bs
        self.t += 1
        self.step_count += 1
        return record


def step_joint(world, actions, t=None):
    """Run one joint step; validates the caller's step index when given."""
    if t is not None and t != world.t:
        raise ContractError(f"caller expected step {t}, world is at {world.t}")
    return world.step(actions)


@dataclass
class EpisodeResult:
    metrics: "EpisodeMetrics"
    records: list = None
    observations: list = None
    actions: list = None


def _as_action(agent, value, step):
    try:
        v = int(value)
        if v not in (0, 1, 2):
            raise ValueError
        return v
    except (TypeError, ValueError):
        raise ContractError(
            f"{agent} emitted invalid action {value!r} at step {step}; "
            "must be 0, 1, or 2"
        ) from None


def run_episode(scenario, controllers, start_step=None, bundle=None,
                record_trace=False) -> EpisodeResult:
    """Run one full episode under the given per-agent policies.

    Args:
        scenario: Validated ScenarioConfig.
        controllers: Mapping with "ls", "dc", "bat" policies (act/reset).
        start_step: Optional override of the scenario's start step.
        bundle: Optional pre-loaded SeriesBundle (reused across episodes).
        record_trace: Also return per-step records, observations, actions.

    Returns:
        EpisodeResult with aggregated metrics and, when requested, the trace.
    """
    from .metrics import aggregate

    world = World(scenario, bundle=bundle)
    if start_step is not None:
        world.reset(start_step=start_step)
    for key in ("ls", "dc", "bat"):
        controllers[key].reset()
    records = []
    observations = [] if record_trace else None
    actions_log = [] if record_trace else None
    while not world.done:
        obs = world.observations()
        step = world.step_count
        action = JointAction(
            ls=_as_action(AGENT_LS, controllers["ls"].act(obs[AGENT_LS]), step),
            dc=_as_action(AGENT_DC, controllers["dc"].act(obs[AGENT_DC]), step),
            bat=_as_action(AGENT_BAT, controllers["bat"].act(obs[AGENT_BAT]), step),
        )
        record = world.step(action)
        records.append(record)
        if record_trace:
            observations.append(obs)
            actions_log.append({AGENT_LS: action.ls, AGENT_DC: action.dc,
                                AGENT_BAT: action.bat})
    return EpisodeResult(
        metrics=aggregate(records),
        records=records if record_trace else None,
        observations=observations,
        actions=actions_log,
    )

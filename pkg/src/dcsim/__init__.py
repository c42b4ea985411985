"""dcsim: deterministic co-simulation of data-center workload shifting,
cooling, and battery dispatch, plus a controller benchmark harness."""

from .battery import BatAction, BatteryParams, BatteryState, max_rates, step_battery
from .config import DCPhysicalConfig, ScenarioConfig, default_scenario, load_scenario, \
    scenario_from_dict
from .data_ingest import HourlySeries, SeriesBundle, build_bundle, forecast_window, \
    load_bundle, load_ci, load_weather, load_workload, resample_to_steps, wet_bulb_temp
from .metrics import EpisodeMetrics, aggregate, normalize_table
from .orchestrator import AGENT_BAT, AGENT_DC, AGENT_LS, EpisodeResult, JointAction, \
    OBSERVATION_LAYOUT_VERSION, RewardBounds, StepRecord, World, default_rewards, \
    mix_rewards, run_episode, step_joint
from .plant import DCAction, PlantModel, PlantState, StepPowerBreakdown, cpu_power, \
    crac_return_temp, hvac_chain, inlet_temps, itfan_power, outlet_temps, size_cooling, \
    step_dc, water_usage
from .workload import LSAction, WorkloadState, ls_penalty, observe_ls, split_flexible, \
    step_workload

__version__ = "0.1.0"

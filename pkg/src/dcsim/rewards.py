"""Named registry of per-agent reward functions.

Reward functions take a flat parameter map of named floats, so custom
rewards can be registered and selected by name from the scenario file. The
parameter keys the defaults read:

    bat_total_energy_with_battery_KWh  net step energy incl. battery (kWh)
    norm_CI                            CI / trace max
    bat_dcload_min, bat_dcload_max     per-step energy normalization bounds
    bat_CO2_footprint                  step carbon footprint (kg)
    dc_hvac_energy_KWh, dc_it_energy_KWh
    dc_water_usage_liters              cooling-tower water this step
    ls_tasks_dropped                   task-units dropped this step
    ls_tasks_in_queue                  task-units left in the queue
    ls_current_hour                    absolute step index
    ls_steps_per_hour                  steps per hour of the scenario
"""

from dataclasses import dataclass

from .errors import DcsimError, DomainError
from .workload import WorkloadState, ls_penalty


class UnknownRewardError(DcsimError, LookupError):
    """Requested reward name is not registered."""


@dataclass(frozen=True)
class RewardSpec:
    """A named reward function and the parameter keys it reads."""

    name: str
    fn: callable
    params: tuple


def default_ls_reward(params):
    """Normalized energy-carbon product plus the load-shifting penalties."""
    total = params["bat_total_energy_with_battery_KWh"]
    lo = params["bat_dcload_min"]
    hi = params["bat_dcload_max"]
    if not hi > lo:
        raise DomainError(f"degenerate dc-load bounds [{lo}, {hi}]")
    norm_net_dc_load = (total - lo) / (hi - lo)
    footprint = -1.0 * params["norm_CI"] * norm_net_dc_load
    steps_per_hour = int(params.get("ls_steps_per_hour", 4))
    state = WorkloadState(queue=params["ls_tasks_in_queue"],
                          dropped_this_step=params["ls_tasks_dropped"])
    step_in_day = int(params["ls_current_hour"]) % (24 * steps_per_hour)
    return footprint + ls_penalty(state, step_in_day, steps_per_hour)


def default_dc_reward(params):
    """Negated total DC energy (HVAC plus IT), in kWh."""
    return -1.0 * (params["dc_hvac_energy_KWh"] + params["dc_it_energy_KWh"])


def default_bat_reward(params):
    """Negated step carbon footprint, in kg."""
    return -1.0 * params["bat_CO2_footprint"]


_REGISTRY = {}


def register(name, fn, params=()):
    """Register a reward function under a unique name."""
    if name in _REGISTRY:
        raise DcsimError(f"reward '{name}' is already registered")
    _REGISTRY[name] = RewardSpec(name=name, fn=fn, params=tuple(params))
    return _REGISTRY[name]


def resolve(name) -> RewardSpec:
    """Look up a registered reward by name.

    Raises:
        UnknownRewardError: listing the registered names.
    """
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownRewardError(
            f"unknown reward '{name}'; registered: {sorted(_REGISTRY)}"
        ) from None


def registered_names():
    return sorted(_REGISTRY)


register("default_ls_reward", default_ls_reward, params=(
    "bat_total_energy_with_battery_KWh", "norm_CI", "bat_dcload_min",
    "bat_dcload_max", "ls_tasks_dropped", "ls_tasks_in_queue",
    "ls_current_hour", "ls_steps_per_hour",
))
register("default_dc_reward", default_dc_reward, params=(
    "dc_hvac_energy_KWh", "dc_it_energy_KWh",
))
register("default_bat_reward", default_bat_reward, params=(
    "bat_CO2_footprint",
))

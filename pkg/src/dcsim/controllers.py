"""Rule-based policies behind a uniform act/reset interface.

Policies are pure functions of (observation, internal state); resetting
restores the initial internal state exactly. Selection strings like
``ls=baseline,dc=g36,bat=ci3h`` pick policies by name per agent.
"""

import numpy as np

from .errors import ConfigError
from .orchestrator import BAT_OBS_CI_START, DC_OBS_T_ROOM, LS_OBS_CI_START
from .workload import LSAction

LCG_MODULUS = 2147483647  # Park-Miller minimal standard generator
LCG_MULTIPLIER = 48271


class Policy:
    """Interface: act(observation) -> action index in {0, 1, 2}."""

    name = "policy"

    def act(self, observation):
        raise NotImplementedError

    def reset(self):
        pass


class AlwaysAction(Policy):
    def __init__(self, action, name):
        self.action = int(action)
        self.name = name

    def act(self, observation):
        return self.action


class DeadbandSetpointPolicy(Policy):
    """Trim-and-respond proxy for the industry-standard cooling baseline.

    Cools (decreases the setpoint) when the observed room temperature is
    above the upper comfort bound, relaxes (increases) below the lower
    bound, and holds inside the dead band.
    """

    def __init__(self, lower=25.0, upper=27.0):
        if not lower < upper:
            raise ConfigError("controller.dc", f"dead band [{lower}, {upper}] is empty")
        self.lower = lower
        self.upper = upper
        self.name = "g36"

    def act(self, observation):
        t_room = observation[DC_OBS_T_ROOM]
        if t_room > self.upper:
            return 0
        if t_room < self.lower:
            return 2
        return 1


class CIThresholdBatteryPolicy(Policy):
    """Charge below, discharge above the near-term mean carbon intensity.

    Compares the current CI to the mean of the forecast window covering the
    next `window_hours` hours; a +/- margin (fraction of that mean) prevents
    chattering on flat CI.
    """

    def __init__(self, steps_per_hour=4, window_hours=3, margin=0.05):
        self.window_steps = int(window_hours * steps_per_hour)
        self.margin = margin
        self.name = "ci3h"

    def act(self, observation):
        ci_now = observation[BAT_OBS_CI_START]
        window = observation[BAT_OBS_CI_START + 1:
                             BAT_OBS_CI_START + 1 + self.window_steps]
        if not window:
            return 1
        mean = sum(window) / len(window)
        band = self.margin * mean
        if ci_now < mean - band:
            return 0
        if ci_now > mean + band:
            return 2
        return 1


class GreedyLoadShiftPolicy(Policy):
    """Defer work in the top tail of the CI forecast window, process in the
    bottom tail, do nothing in between."""

    def __init__(self, percentile=75.0):
        if not 50.0 < percentile < 100.0:
            raise ConfigError("controller.ls",
                              f"percentile must be in (50, 100), got {percentile}")
        self.percentile = percentile
        self.name = f"greedy{percentile:g}"

    def act(self, observation):
        ci_now = observation[LS_OBS_CI_START]
        window = observation[LS_OBS_CI_START:-1]  # forecast window; last entry is SoC
        hi = float(np.percentile(window, self.percentile))
        lo = float(np.percentile(window, 100.0 - self.percentile))
        if ci_now > hi:
            return int(LSAction.DEFER)
        if ci_now < lo:
            return int(LSAction.PROCESS_QUEUE)
        return int(LSAction.DO_NOTHING)


class ScriptedPolicy(Policy):
    """Deterministic pseudo-random action stream (for golden traces)."""

    def __init__(self, seed):
        self.seed = int(seed)
        self.name = f"scripted{seed}"
        self.reset()

    def reset(self):
        x = self.seed % (LCG_MODULUS - 1)
        self._x = x if x != 0 else 1

    def act(self, observation):
        self._x = (self._x * LCG_MULTIPLIER) % LCG_MODULUS
        return self._x % 3


def baseline_ls():
    """Never moves workload: always the do-nothing action."""
    return AlwaysAction(1, "baseline")


def baseline_dc(lower=25.0, upper=27.0):
    return DeadbandSetpointPolicy(lower, upper)


def baseline_bat(steps_per_hour=4, window_hours=3, margin=0.05):
    return CIThresholdBatteryPolicy(steps_per_hour, window_hours, margin)


def greedy_ls(percentile=75.0):
    return GreedyLoadShiftPolicy(percentile)


_FACTORY = {
    "ls": {
        "baseline": lambda arg, sph: baseline_ls(),
        "greedy": lambda arg, sph: greedy_ls(float(arg) if arg else 75.0),
        "scripted": lambda arg, sph: ScriptedPolicy(int(arg)),
    },
    "dc": {
        "g36": lambda arg, sph: baseline_dc(),
        "baseline": lambda arg, sph: baseline_dc(),
        "maintain": lambda arg, sph: AlwaysAction(1, "maintain"),
        "scripted": lambda arg, sph: ScriptedPolicy(int(arg)),
    },
    "bat": {
        "ci3h": lambda arg, sph: baseline_bat(steps_per_hour=sph),
        "baseline": lambda arg, sph: baseline_bat(steps_per_hour=sph),
        "idle": lambda arg, sph: AlwaysAction(1, "idle"),
        "scripted": lambda arg, sph: ScriptedPolicy(int(arg)),
    },
}


def make_policy(agent, spec, steps_per_hour=4):
    """Build one policy from a name like "greedy", "greedy:80", "scripted:7"."""
    name, _, arg = spec.partition(":")
    try:
        factory = _FACTORY[agent][name]
    except KeyError:
        raise ConfigError(
            f"controller.{agent}",
            f"unknown policy '{name}'; available: {sorted(_FACTORY[agent])}",
        ) from None
    try:
        return factory(arg, steps_per_hour)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"controller.{agent}", f"bad argument '{arg}': {exc}") from exc


def parse_controllers(spec, steps_per_hour=4):
    """Parse "ls=baseline,dc=g36,bat=ci3h" into a policy mapping.

    Omitted agents default to their baselines.
    """
    chosen = {"ls": "baseline", "dc": "g36", "bat": "ci3h"}
    if spec:
        for part in spec.split(","):
            agent, sep, name = part.partition("=")
            agent = agent.strip()
            if not sep or agent not in chosen or not name:
                raise ConfigError("controllers", f"malformed entry '{part}'")
            chosen[agent] = name.strip()
    return {agent: make_policy(agent, name, steps_per_hour)
            for agent, name in chosen.items()}

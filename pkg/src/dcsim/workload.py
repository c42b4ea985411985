"""Flexible/non-flexible workload splitting, the deferral queue, and the
load-shifting penalty.

The queue holds aggregate task-units (load fraction x steps), not individual
task records. Deferring moves the flexible share of the arriving load into
the queue; processing drains the queue up to spare capacity. Work is
conserved: executed + queued + dropped always equals what arrived.
"""

import math
from dataclasses import dataclass
from enum import IntEnum

from .data_ingest import forecast_window

PENALTY_PER_DROPPED_TASK = -10.0
# Queue-ramp constants: the ramp is active only in the last hour of the day.
QUEUE_RAMP_LO = 0.95833
QUEUE_RAMP_HI = 0.98935


class LSAction(IntEnum):
    DEFER = 0
    DO_NOTHING = 1
    PROCESS_QUEUE = 2


@dataclass
class WorkloadState:
    """Deferral-queue state carried across steps.

    Attributes:
        queue: Task-units waiting to be executed, 0 <= queue <= queue_max.
        pending: Net task-units deferred-but-not-executed within the current
            day; resets at each day boundary.
        dropped_this_step: Task-units discarded on queue overflow last step.
        step_in_day: 0 .. 24*steps_per_hour - 1.
    """

    queue: float = 0.0
    pending: float = 0.0
    dropped_this_step: float = 0.0
    step_in_day: int = 0


def split_flexible(b_t, flexible_ratio):
    """Split instantaneous load into (flexible, non-flexible) shares."""
    flex = flexible_ratio * b_t
    return flex, b_t - flex


def step_workload(state, action, b_t, flexible_ratio, c_max=1.0, queue_max=500.0,
                  steps_per_day=96):
    """Apply one load-shifting action and advance the queue.

    DEFER executes only the non-flexible share and queues the flexible share
    (overflow beyond queue_max is counted as dropped and discarded).
    DO_NOTHING executes the arriving load as-is. PROCESS_QUEUE additionally
    drains the queue up to the spare capacity c_max - b_t. The executed load
    never exceeds c_max.

    Returns:
        (b_hat, new_state): executed load fraction and the successor state.
    """
    action = LSAction(action)
    flex, nonflex = split_flexible(b_t, flexible_ratio)
    queue = state.queue
    pending = state.pending
    dropped = 0.0
    if action == LSAction.DEFER:
        b_hat = nonflex
        queue += flex
        if queue > queue_max:
            dropped = queue - queue_max
            queue = queue_max
        pending += flex - dropped
    elif action == LSAction.PROCESS_QUEUE:
        executed = min(queue, c_max - b_t)
        b_hat = b_t + executed
        queue -= executed
        pending = max(0.0, pending - executed)
    else:
        b_hat = b_t
    next_step_in_day = (state.step_in_day + 1) % steps_per_day
    if next_step_in_day == 0:
        pending = 0.0
    return b_hat, WorkloadState(
        queue=queue,
        pending=pending,
        dropped_this_step=dropped,
        step_in_day=next_step_in_day,
    )


def ls_penalty(state, step_in_day, steps_per_hour):
    """Load-shifting penalty: dropped tasks plus the end-of-day queue ramp.

    Each dropped task-unit costs -10. From hour 23 onward the residual queue
    is penalised with a factor ramping linearly over the final hour:
    factor = (step_in_day/steps_in_day - 0.95833) / (0.98935 - 0.95833),
    contributing -factor * queue / 10. Always <= 0.
    """
    penalty = state.dropped_this_step * PENALTY_PER_DROPPED_TASK
    steps_in_day = 24 * steps_per_hour
    if step_in_day >= 23 * steps_per_hour:
        factor = (step_in_day / steps_in_day - QUEUE_RAMP_LO) / (QUEUE_RAMP_HI - QUEUE_RAMP_LO)
        penalty += -factor * state.queue / 10.0
    return penalty


def observe_ls(state, t, bundle, battery_soc, queue_max, forecast_len):
    """Observation vector for the load-shifting agent at step t.

    Layout (fixed order, 7 + forecast_len + 1 features):
        [sin hour, cos hour, sin day-of-year, cos day-of-year,
         current load fraction, queue / queue_max,
         CI forecast window (forecast_len + 1 values, / trace max),
         battery state of charge]
    """
    feats = _time_features(t, bundle.steps_per_hour)
    feats.append(bundle.workload[t % len(bundle)])
    feats.append(state.queue / queue_max)
    feats.extend(forecast_window(bundle.ci_normalized, t, forecast_len))
    feats.append(battery_soc)
    return feats


def _time_features(t, steps_per_hour):
    steps_per_day = 24 * steps_per_hour
    day_phase = 2.0 * math.pi * (t % steps_per_day) / steps_per_day
    year_phase = 2.0 * math.pi * ((t // steps_per_day) % 365) / 365.0
    return [math.sin(day_phase), math.cos(day_phase),
            math.sin(year_phase), math.cos(year_phase)]

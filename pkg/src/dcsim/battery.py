"""Battery bank state-of-charge dynamics with rate limits and efficiencies.

Sign convention for the per-step grid energy: charging draws energy from the
grid (positive), discharging supplies the data center (negative). Charging
losses are paid on the way in (grid draw exceeds the stored gain) and
discharging losses on the way out (delivery is less than the stored drop).
"""

from dataclasses import dataclass
from enum import IntEnum

from .errors import ConfigError


class BatAction(IntEnum):
    CHARGE = 0
    IDLE = 1
    DISCHARGE = 2


@dataclass(frozen=True)
class BatteryParams:
    """Capacity, efficiency, and rate-cap parameters of the battery bank.

    The admissible power on either leg is capped at u * p_max + v, a linear
    relation whose coefficients default to the identity (u=1, v=0).
    """

    capacity_kwh: float = 1000.0
    eta_charge: float = 0.95
    eta_discharge: float = 0.95
    p_charge_max_kw: float = 300.0
    p_discharge_max_kw: float = 300.0
    rate_cap_u: float = 1.0
    rate_cap_v: float = 0.0

    def validate(self, where="battery"):
        if not self.capacity_kwh > 0:
            raise ConfigError(f"{where}.capacity_kwh", "must be > 0")
        for name, eta in (("eta_charge", self.eta_charge), ("eta_discharge", self.eta_discharge)):
            if not 0.0 < eta <= 1.0:
                raise ConfigError(f"{where}.{name}", "must be in (0, 1]")
        for name, p in (
            ("p_charge_max_kw", self.p_charge_max_kw),
            ("p_discharge_max_kw", self.p_discharge_max_kw),
        ):
            if p < 0:
                raise ConfigError(f"{where}.{name}", "must be >= 0")
        return self


@dataclass
class BatteryState:
    """Stored energy in kWh, always within [0, capacity]."""

    stored_kwh: float = 0.0

    def soc(self, params: BatteryParams) -> float:
        return self.stored_kwh / params.capacity_kwh


def max_rates(state: BatteryState, params: BatteryParams, dt_hours: float):
    """Admissible charge and discharge rates (kW) for the coming step.

    The charge rate is limited so the stored gain cannot exceed the remaining
    headroom, and by the power cap; the discharge rate likewise by the stored
    energy and its cap. Both are >= 0.
    """
    cap_charge = params.rate_cap_u * params.p_charge_max_kw + params.rate_cap_v
    cap_discharge = params.rate_cap_u * params.p_discharge_max_kw + params.rate_cap_v
    headroom = params.capacity_kwh - state.stored_kwh
    r_charge = min(headroom / (params.eta_charge * dt_hours), cap_charge)
    r_discharge = min(state.stored_kwh / (params.eta_discharge * dt_hours), cap_discharge)
    return max(0.0, r_charge), max(0.0, r_discharge)


def step_battery(state: BatteryState, action, params: BatteryParams, dt_hours: float):
    """Advance the battery one step.

    Charging stores r_charge * eta_charge * dt while drawing r_charge * dt
    from the grid. Discharging removes up to r_discharge * dt from storage
    (floored so the store never goes negative) and delivers eta_discharge
    times the removed amount.

    Returns:
        (new_state, e_signed_kwh): grid draw (>= 0) when charging, negative
        delivered energy when discharging, 0 when idle.
    """
    action = BatAction(action)
    r_charge, r_discharge = max_rates(state, params, dt_hours)
    if action == BatAction.CHARGE:
        gained = r_charge * params.eta_charge * dt_hours
        new = BatteryState(min(params.capacity_kwh, state.stored_kwh + gained))
        return new, r_charge * dt_hours
    if action == BatAction.DISCHARGE:
        drop = min(r_discharge * dt_hours, state.stored_kwh)
        new = BatteryState(state.stored_kwh - drop)
        return new, -drop * params.eta_discharge
    return BatteryState(state.stored_kwh), 0.0

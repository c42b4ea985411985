"""Line-delimited JSON session protocol over stdin/stdout.

One request per line, one response per line. Requests:

    {"op": "reset", "config": <path>, "seed": <int>, "start_step": <int>?,
     "horizon": <int>?}                     -> {"ok": true, "obs": {...},
                                               "layout_version": "1"}
    {"op": "reset", "scenario": {...}}      same, with an inline scenario
    {"op": "step", "actions": {"agent_ls": 0, "agent_dc": 1,
                               "agent_bat": 2}}
        -> {"ok": true, "obs": {...}, "rewards": {...}, "done": false,
            "info": {...step record fields...}}
    {"op": "close"}                         -> {"ok": true}

Errors come back as {"ok": false, "error": {"type": ..., "message": ...}};
the session survives recoverable errors (bad action, validation failure).
"""

import dataclasses
import json
import sys

from .config import load_scenario, scenario_from_dict
from .errors import ContractError, DcsimError
from .orchestrator import AGENT_BAT, AGENT_DC, AGENT_IDS, AGENT_LS, \
    JointAction, OBSERVATION_LAYOUT_VERSION, World


def _error(kind, message):
    return {"ok": False, "error": {"type": kind, "message": message}}


class Session:
    """One environment session: reset once (or more), then step to done."""

    def __init__(self):
        self.world = None
        self.horizon = None

    def handle(self, req):
        try:
            op = req.get("op")
            if op == "reset":
                return self._reset(req)
            if op == "step":
                return self._step(req)
            if op == "close":
                return {"ok": True, "closed": True}
            return _error("usage", f"unknown op {op!r}")
        except ContractError as exc:
            return _error("contract", str(exc))
        except DcsimError as exc:
            return _error("validation", str(exc))
        except Exception as exc:  # keep the session usable for the client
            return _error("runtime", f"{type(exc).__name__}: {exc}")

    def _reset(self, req):
        if "scenario" in req:
            scenario = scenario_from_dict(req["scenario"])
        elif "config" in req:
            scenario = load_scenario(req["config"])
        else:
            return _error("usage", "reset needs 'config' or 'scenario'")
        if "horizon" in req and req["horizon"] is not None:
            scenario = dataclasses.replace(scenario, horizon_steps=int(req["horizon"]))
            scenario.validate()
        world = World(scenario)
        if req.get("start_step") is not None:
            world.reset(start_step=int(req["start_step"]))
        # The seed is recorded for interface parity; episode dynamics are
        # fully deterministic and do not consume it.
        self.world = world
        self.horizon = scenario.horizon_steps
        return {
            "ok": True,
            "obs": world.observations(),
            "layout_version": OBSERVATION_LAYOUT_VERSION,
            "horizon": self.horizon,
            "seed": req.get("seed", scenario.seed),
        }

    def _step(self, req):
        if self.world is None:
            return _error("usage", "step before reset")
        if self.world.done:
            return _error("usage", "step called after the episode finished")
        actions = req.get("actions")
        if not isinstance(actions, dict):
            return _error("contract", "step needs an 'actions' object")
        indices = {}
        for agent in AGENT_IDS:
            if agent not in actions:
                return _error("contract", f"missing action for {agent}")
            v = actions[agent]
            if not isinstance(v, int) or isinstance(v, bool) or v not in (0, 1, 2):
                return _error("contract",
                              f"{agent} action {v!r} invalid; must be 0, 1, or 2")
            indices[agent] = v
        record = self.world.step(JointAction(
            ls=indices[AGENT_LS], dc=indices[AGENT_DC], bat=indices[AGENT_BAT]))
        return {
            "ok": True,
            "obs": self.world.observations(),
            "rewards": {
                AGENT_LS: record.mixed_r_ls,
                AGENT_DC: record.mixed_r_dc,
                AGENT_BAT: record.mixed_r_bat,
            },
            "done": self.world.done,
            "info": record.to_dict(),
        }


def serve(stdin=None, stdout=None):
    """Serve one session over the given streams until close/EOF."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = Session()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            resp = _error("protocol", f"bad JSON: {exc.msg}")
        else:
            resp = session.handle(req)
        stdout.write(json.dumps(resp) + "\n")
        stdout.flush()
        if resp.get("closed"):
            break
    return 0

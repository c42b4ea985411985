"""Episode metric aggregation and cross-controller comparison tables."""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# Fixed emission order. All five domain metrics are lower-is-better.
METRIC_COLUMNS = ["cfp_kg", "hvac_kwh", "it_kwh", "water_liters",
                  "task_queue", "dropped_total"]


@dataclass(frozen=True)
class EpisodeMetrics:
    """Aggregates of one episode trace.

    cfp/energy/water are sums over steps; task_queue is the mean residual
    queue; dropped_total the total task-units discarded on overflow.
    """

    cfp_kg: float
    hvac_kwh: float
    it_kwh: float
    water_liters: float
    task_queue: float
    dropped_total: float

    def as_row(self):
        return [getattr(self, c) for c in METRIC_COLUMNS]


def aggregate(records) -> EpisodeMetrics:
    """Aggregate per-step records into episode metrics.

    Raises:
        DomainError: empty trace.
    """
    if not records:
        raise DomainError("cannot aggregate an empty trace")
    return EpisodeMetrics(
        cfp_kg=sum(r.cfp_kg for r in records),
        hvac_kwh=sum(r.e_hvac for r in records),
        it_kwh=sum(r.e_it for r in records),
        water_liters=sum(r.water_liters for r in records),
        task_queue=sum(r.queue for r in records) / len(records),
        dropped_total=sum(r.dropped for r in records),
    )


@dataclass
class ZColumn:
    values: list
    z: list
    flat: bool  # zero spread: z emitted as all-zeros


@dataclass
class NormalizedTable:
    """Per-metric z-scores across controllers (population std).

    All metrics are lower-is-better, so more-negative z means better.
    """

    controllers: list
    columns: dict = field(default_factory=dict)
    orientation: str = "lower_is_better"


def normalize_table(metrics_by_controller) -> NormalizedTable:
    """Z-score each metric across controllers.

    Args:
        metrics_by_controller: mapping of controller label -> EpisodeMetrics
            (or a metric row list). Needs at least two controllers.
    """
    if len(metrics_by_controller) < 2:
        raise DomainError("need >= 2 controllers to normalize")
    controllers = list(metrics_by_controller)
    table = NormalizedTable(controllers=controllers)
    for i, col in enumerate(METRIC_COLUMNS):
        values = []
        for label in controllers:
            m = metrics_by_controller[label]
            values.append(m.as_row()[i] if isinstance(m, EpisodeMetrics) else m[i])
        arr = np.asarray(values, dtype=float)
        std = float(arr.std())  # population std
        if std == 0.0:
            z = [0.0] * len(values)
            flat = True
        else:
            mean = float(arr.mean())
            z = [(v - mean) / std for v in values]
            flat = False
        table.columns[col] = ZColumn(values=values, z=z, flat=flat)
    return table


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def metrics_csv_text(rows):
    """CSV text for (label, EpisodeMetrics) pairs, fixed column order."""
    lines = ["controller," + ",".join(METRIC_COLUMNS)]
    for label, m in rows:
        lines.append(",".join([label] + [_fmt(v) for v in m.as_row()]))
    return "\n".join(lines) + "\n"


def metrics_json_text(rows):
    payload = [{"controller": label, **dict(zip(METRIC_COLUMNS, m.as_row()))}
               for label, m in rows]
    return json.dumps(payload, indent=2) + "\n"


def ztable_csv_text(table: NormalizedTable):
    lines = ["controller," + ",".join(f"z_{c}" for c in METRIC_COLUMNS)]
    for i, label in enumerate(table.controllers):
        zs = [table.columns[c].z[i] for c in METRIC_COLUMNS]
        lines.append(",".join([label] + [_fmt(z) for z in zs]))
    return "\n".join(lines) + "\n"


def ztable_json_text(table: NormalizedTable):
    payload = {
        "orientation": table.orientation,
        "controllers": table.controllers,
        "columns": {
            c: {"values": col.values, "z": col.z, "flat": col.flat}
            for c, col in table.columns.items()
        },
    }
    return json.dumps(payload, indent=2) + "\n"

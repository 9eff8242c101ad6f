"""Scenario configuration: a single JSON document describing a run.

Schema (graph path resolved relative to the config file):

    {
      "graph": "cycle5.txt",
      "x0": [1, 2, 3, 4, 5],          // or {"seed": 7} for random
                                      // distinct integers
      "failed_edge": [1, 2],          // optional, with "t_f"
      "t_f": 5.0,
      "t_end": 10.0,                  // optional, default 2 * t_f
      "dt": 0.01,                     // optional
      "z": 4,                         // optional, default n - 1
      "sensors": [2, 3],              // or "auto-detection" / "auto-isolation"
      "thresholds": {"abs_floor": 1e-6, "rel": 1e-4}   // optional
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .dynamics import DEFAULT_DT, Scenario, random_distinct_state
from .fdi import DEFAULT_ABS_FLOOR, DEFAULT_REL_SCALE
from .graph import Digraph, Edge, load_digraph
from .placement import (
    default_max_order,
    greedy_detection_placement,
    greedy_isolation_placement,
)

__all__ = ["ConfigError", "NoIsolatingSetError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    """Raised when a scenario config cannot be used."""


class NoIsolatingSetError(ConfigError):
    """auto-isolation was requested but no sensor set can isolate."""


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: scenario, sensors, orders, thresholds."""

    graph_path: str
    graph: Digraph
    scenario: Scenario
    sensors: tuple[int, ...]
    sensor_mode: str
    z: int
    abs_floor: float
    rel: float

    def params(self) -> dict:
        """Defaults materialized for report provenance."""
        return {
            "graph": self.graph_path,
            "x0": list(self.scenario.x0),
            "failed_edge": list(self.scenario.failed_edge)
            if self.scenario.failed_edge
            else None,
            "t_f": self.scenario.t_f,
            "t_end": self.scenario.t_end,
            "dt": self.scenario.dt,
            "z": self.z,
            "sensors": list(self.sensors),
            "sensor_mode": self.sensor_mode,
            "thresholds": {"abs_floor": self.abs_floor, "rel": self.rel},
        }


def load_config(path) -> RunConfig:
    """Load and resolve a scenario config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "graph", "x0", "failed_edge", "t_f", "t_end", "dt", "z",
        "sensors", "thresholds",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "graph" not in raw:
        raise ConfigError("config needs a 'graph' path")

    graph_path = raw["graph"]
    if not os.path.isabs(graph_path):
        graph_path = os.path.join(os.path.dirname(os.path.abspath(path)), graph_path)
    try:
        graph = load_digraph(graph_path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load graph {graph_path}: {exc}") from exc

    x0_spec = raw.get("x0")
    if isinstance(x0_spec, dict):
        if set(x0_spec) != {"seed"}:
            raise ConfigError("x0 object form must be {\"seed\": <int>}")
        x0 = random_distinct_state(graph.n, int(x0_spec["seed"]))
    elif isinstance(x0_spec, list):
        x0 = [float(v) for v in x0_spec]
    else:
        raise ConfigError("config needs 'x0': a vector or {\"seed\": <int>}")

    failed = raw.get("failed_edge")
    if failed is not None:
        if not (isinstance(failed, list) and len(failed) == 2):
            raise ConfigError("failed_edge must be a [tail, head] pair")
        failed = Edge(int(failed[0]), int(failed[1]))

    try:
        scenario = Scenario(
            graph=graph,
            x0=tuple(x0),
            t_end=raw.get("t_end"),
            dt=float(raw.get("dt", DEFAULT_DT)),
            t_f=float(raw["t_f"]) if raw.get("t_f") is not None else None,
            failed_edge=failed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    z = int(raw.get("z", default_max_order(graph)))
    if z < 1:
        raise ConfigError("z must be at least 1")

    sensors_spec = raw.get("sensors", "auto-detection")
    if sensors_spec == "auto-detection":
        sensors = greedy_detection_placement(graph, z).sensors
        mode = "auto-detection"
    elif sensors_spec == "auto-isolation":
        result = greedy_isolation_placement(graph, z)
        if result is None:
            raise NoIsolatingSetError(
                "no isolating sensor set exists for this graph"
            )
        sensors = result.sensors
        mode = "auto-isolation"
    elif isinstance(sensors_spec, list):
        sensors = tuple(sorted(set(int(p) for p in sensors_spec)))
        for p in sensors:
            if not (1 <= p <= graph.n):
                raise ConfigError(f"sensor {p} out of range 1..{graph.n}")
        mode = "explicit"
    else:
        raise ConfigError(
            "sensors must be a list, 'auto-detection' or 'auto-isolation'"
        )

    thresholds = raw.get("thresholds", {})
    if not isinstance(thresholds, dict) or set(thresholds) - {"abs_floor", "rel"}:
        raise ConfigError("thresholds must be {'abs_floor': ..., 'rel': ...}")

    return RunConfig(
        graph_path=graph_path,
        graph=graph,
        scenario=scenario,
        sensors=sensors,
        sensor_mode=mode,
        z=z,
        abs_floor=float(thresholds.get("abs_floor", DEFAULT_ABS_FLOOR)),
        rel=float(thresholds.get("rel", DEFAULT_REL_SCALE)),
    )

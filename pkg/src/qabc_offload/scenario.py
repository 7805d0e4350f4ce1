"""Network snapshot: vehicles, roadside units, cloud, and their tasks.

A :class:`Scenario` is immutable once built. It can be generated from a seed
(:func:`generate_scenario`) or read from a JSON document
(:func:`load_scenario` / :func:`save_scenario`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

__all__ = [
    "TaskSpec",
    "VehicleNode",
    "RsuNode",
    "CloudNode",
    "ChannelParams",
    "Scenario",
    "GenerationParams",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "generate_scenario",
    "serving_rsu",
    "load_scenario",
    "save_scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "dumps_scenario",
    "reference_scenario",
]

REFERENCE_SCENARIO_PATH = Path(__file__).with_name("data") / "reference_scenario.json"


class ScenarioError(ValueError):
    pass


class ScenarioParseError(ScenarioError):
    """The document does not match the scenario schema."""


class ScenarioValidationError(ScenarioError):
    """A value violates a domain invariant."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioValidationError(msg)


def _finite(name: str, value: float) -> None:
    _require(math.isfinite(value), f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TaskSpec:
    cycles: float
    input_bits: float
    deadline_s: float
    weight: float = 1.0  # objective weight

    def __post_init__(self):
        for f in fields(self):
            _finite(f"task.{f.name}", getattr(self, f.name))
        _require(self.cycles >= 0, f"task.cycles must be >= 0, got {self.cycles}")
        _require(self.input_bits >= 0, f"task.input_bits must be >= 0, got {self.input_bits}")
        _require(self.deadline_s > 0, f"task.deadline_s must be > 0, got {self.deadline_s}")
        _require(self.weight > 0, f"task.weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class VehicleNode:
    id: int
    position_m: float
    cpu_hz: float
    tx_power_w: float
    antenna_gain: float
    tasks: tuple[TaskSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        for name in ("position_m", "cpu_hz", "tx_power_w", "antenna_gain"):
            _finite(f"vehicle[{self.id}].{name}", getattr(self, name))
        _require(self.cpu_hz > 0, f"vehicle[{self.id}].cpu_hz must be > 0")
        _require(self.tx_power_w >= 0, f"vehicle[{self.id}].tx_power_w must be >= 0")
        _require(self.antenna_gain > 0, f"vehicle[{self.id}].antenna_gain must be > 0")


@dataclass(frozen=True)
class RsuNode:
    id: int
    position_m: float
    range_m: float
    mec_hz: float
    cpu_capacity_cycles: float
    backhaul_bps: float
    interference_w: float = 0.0

    def __post_init__(self):
        for name in ("position_m", "range_m", "mec_hz", "cpu_capacity_cycles",
                     "backhaul_bps", "interference_w"):
            _finite(f"rsu[{self.id}].{name}", getattr(self, name))
        _require(self.range_m > 0, f"rsu[{self.id}].range_m must be > 0")
        _require(self.mec_hz > 0, f"rsu[{self.id}].mec_hz must be > 0")
        _require(self.cpu_capacity_cycles > 0, f"rsu[{self.id}].cpu_capacity_cycles must be > 0")
        _require(self.backhaul_bps > 0, f"rsu[{self.id}].backhaul_bps must be > 0")
        _require(self.interference_w >= 0, f"rsu[{self.id}].interference_w must be >= 0")

    def covers(self, position_m: float) -> bool:
        return abs(position_m - self.position_m) <= self.range_m


@dataclass(frozen=True)
class CloudNode:
    cpu_hz: float
    prop_delay_s: float
    cpu_capacity_cycles: float

    def __post_init__(self):
        for f in fields(self):
            _finite(f"cloud.{f.name}", getattr(self, f.name))
        _require(self.cpu_hz > 0, "cloud.cpu_hz must be > 0")
        _require(self.prop_delay_s >= 0, "cloud.prop_delay_s must be >= 0")
        _require(self.cpu_capacity_cycles > 0, "cloud.cpu_capacity_cycles must be > 0")


@dataclass(frozen=True)
class ChannelParams:
    bandwidth_hz: float
    noise_w: float

    def __post_init__(self):
        for f in fields(self):
            _finite(f"channel.{f.name}", getattr(self, f.name))
        _require(self.bandwidth_hz > 0, "channel.bandwidth_hz must be > 0")
        _require(self.noise_w > 0, "channel.noise_w must be > 0")


@dataclass(frozen=True)
class Scenario:
    """Immutable snapshot of the three-tier network.

    Tasks are addressed by a global index obtained by concatenating each
    vehicle's task list in vehicle order. ``horizon_s`` defaults to the
    largest task deadline when omitted.
    """

    vehicles: tuple[VehicleNode, ...]
    rsus: tuple[RsuNode, ...]
    cloud: CloudNode
    channel: ChannelParams
    horizon_s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "rsus", tuple(self.rsus))
        _require(len(self.vehicles) >= 1, "scenario needs at least one vehicle")
        _require(len(self.rsus) >= 1, "scenario needs at least one RSU")
        _require(sum(len(v.tasks) for v in self.vehicles) >= 1,
                 "scenario needs at least one task")
        _require(len({v.id for v in self.vehicles}) == len(self.vehicles),
                 "vehicle ids must be unique")
        _require(len({r.id for r in self.rsus}) == len(self.rsus),
                 "RSU ids must be unique")
        if self.horizon_s is None:
            horizon = max(t.deadline_s for v in self.vehicles for t in v.tasks)
            object.__setattr__(self, "horizon_s", float(horizon))
        _finite("horizon_s", self.horizon_s)
        _require(self.horizon_s > 0, "horizon_s must be > 0")
        for v in self.vehicles:
            _require(any(r.covers(v.position_m) for r in self.rsus),
                     f"vehicle[{v.id}] at {v.position_m} m is outside every RSU range")

    @property
    def n_tasks(self) -> int:
        return len(self.flat_tasks)

    @cached_property
    def flat_tasks(self) -> tuple[tuple[VehicleNode, TaskSpec], ...]:
        """(vehicle, task) pairs in global task order."""
        return tuple((v, t) for v in self.vehicles for t in v.tasks)

    @cached_property
    def task_rsus(self) -> tuple[RsuNode, ...]:
        """Serving RSU of every task, in global task order."""
        by_vehicle = {v.id: serving_rsu(self, v) for v in self.vehicles}
        return tuple(by_vehicle[v.id] for v, _ in self.flat_tasks)


def serving_rsu(scenario: Scenario, vehicle: VehicleNode) -> RsuNode:
    """Nearest covering RSU; equal distances go to the lowest id."""
    covering = [r for r in scenario.rsus if r.covers(vehicle.position_m)]
    return min(covering, key=lambda r: (abs(vehicle.position_m - r.position_m), r.id))


# ---------------------------------------------------------------- generation

@dataclass(frozen=True)
class GenerationParams:
    """Counts and (low, high) value ranges for :func:`generate_scenario`.

    RSUs are evenly spaced along ``[0, highway_m]`` at the centres of equal
    segments; vehicles are placed uniformly along the same segment. RSU and
    cloud capacities are ``capacity_fraction * frequency * horizon``.
    """

    n_vehicles: int = 5
    n_rsus: int = 3
    tasks_per_vehicle: int = 2
    highway_m: float = 1000.0
    rsu_range_m: float = 250.0
    cycles: tuple[float, float] = (2e8, 2e9)
    input_bits: tuple[float, float] = (1e5, 4e6)
    deadline_s: tuple[float, float] = (0.5, 2.0)
    vehicle_cpu_hz: tuple[float, float] = (1e9, 2e9)
    tx_power_w: tuple[float, float] = (0.1, 0.5)
    antenna_gain: tuple[float, float] = (1e-8, 1e-7)
    mec_hz: tuple[float, float] = (5e9, 1e10)
    backhaul_bps: tuple[float, float] = (1e8, 1e9)
    interference_w: float = 0.0
    cloud_cpu_hz: float = 5e10
    cloud_prop_delay_s: float = 0.05
    bandwidth_hz: float = 1e7
    noise_w: float = 1e-10
    capacity_fraction: float = 1.0

    def validate(self) -> None:
        for name in ("n_vehicles", "n_rsus", "tasks_per_vehicle"):
            n = getattr(self, name)
            _require(int(n) == n and n >= 1, f"{name} must be an integer >= 1, got {n}")
        _require(self.highway_m > 0, "highway_m must be > 0")
        _require(self.rsu_range_m > 0, "rsu_range_m must be > 0")
        _require(self.capacity_fraction > 0, "capacity_fraction must be > 0")
        strictly_positive = ("cycles", "deadline_s", "vehicle_cpu_hz", "antenna_gain",
                             "mec_hz", "backhaul_bps")
        for name in ("cycles", "input_bits", "deadline_s", "vehicle_cpu_hz", "tx_power_w",
                     "antenna_gain", "mec_hz", "backhaul_bps"):
            lo, hi = getattr(self, name)
            _require(lo < hi, f"{name} range must satisfy low < high, got {(lo, hi)}")
            _require(lo > 0 if name in strictly_positive else lo >= 0,
                     f"{name} lower bound out of domain: {lo}")
        # Edge RSUs sit half a spacing in from each end, so every point of the
        # segment is covered iff the range reaches half the spacing.
        half_gap = self.highway_m / (2 * self.n_rsus)
        _require(self.rsu_range_m >= half_gap,
                 f"rsu_range_m={self.rsu_range_m} leaves gaps: {self.n_rsus} evenly spaced "
                 f"RSUs over {self.highway_m} m need range >= {half_gap}")


def generate_scenario(params: GenerationParams, seed: int) -> Scenario:
    """Draw a random scenario; identical ``(params, seed)`` give identical output."""
    params.validate()
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    def draw(bounds):
        return float(rng.uniform(*bounds))

    spacing = params.highway_m / params.n_rsus
    rsu_draws = [(draw(params.mec_hz), draw(params.backhaul_bps)) for _ in range(params.n_rsus)]
    vehicles = []
    for k in range(params.n_vehicles):
        position = draw((0.0, params.highway_m))
        cpu, power, gain = draw(params.vehicle_cpu_hz), draw(params.tx_power_w), draw(params.antenna_gain)
        tasks = tuple(
            TaskSpec(draw(params.cycles), draw(params.input_bits), draw(params.deadline_s))
            for _ in range(params.tasks_per_vehicle)
        )
        vehicles.append(VehicleNode(k, position, cpu, power, gain, tasks))
    horizon = max(t.deadline_s for v in vehicles for t in v.tasks)
    rsus = tuple(
        RsuNode(
            id=j,
            position_m=(j + 0.5) * spacing,
            range_m=params.rsu_range_m,
            mec_hz=mec,
            cpu_capacity_cycles=params.capacity_fraction * mec * horizon,
            backhaul_bps=backhaul,
            interference_w=params.interference_w,
        )
        for j, (mec, backhaul) in enumerate(rsu_draws)
    )
    cloud = CloudNode(
        cpu_hz=params.cloud_cpu_hz,
        prop_delay_s=params.cloud_prop_delay_s,
        cpu_capacity_cycles=params.capacity_fraction * params.cloud_cpu_hz * horizon,
    )
    return Scenario(tuple(vehicles), rsus, cloud,
                    ChannelParams(params.bandwidth_hz, params.noise_w), horizon)


# ---------------------------------------------------------------- file format

_TASK_KEYS = ("cycles", "input_bits", "deadline_s", "weight")
_TASK_OPTIONAL = {"weight"}
_VEHICLE_KEYS = ("id", "position_m", "cpu_hz", "tx_power_w", "antenna_gain", "tasks")
_RSU_KEYS = ("id", "position_m", "range_m", "mec_hz", "cpu_capacity_cycles",
             "backhaul_bps", "interference_w")
_RSU_OPTIONAL = {"interference_w"}
_CLOUD_KEYS = ("cpu_hz", "prop_delay_s", "cpu_capacity_cycles")
_CHANNEL_KEYS = ("bandwidth_hz", "noise_w")
_TOP_KEYS = ("channel", "cloud", "rsus", "vehicles", "horizon_s")


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    def node(obj, keys):
        return {k: getattr(obj, k) for k in keys}

    def task(t):
        doc = node(t, _TASK_KEYS[:-1])
        if t.weight != 1.0:
            doc["weight"] = t.weight
        return doc

    return {
        "channel": node(scenario.channel, _CHANNEL_KEYS),
        "cloud": node(scenario.cloud, _CLOUD_KEYS),
        "rsus": [node(r, _RSU_KEYS) for r in scenario.rsus],
        "vehicles": [
            {**node(v, _VEHICLE_KEYS[:-1]), "tasks": [task(t) for t in v.tasks]}
            for v in scenario.vehicles
        ],
        "horizon_s": scenario.horizon_s,
    }


def _section(obj: Any, path: str, keys, optional=frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioParseError(f"{path}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - set(keys))
    if unknown:
        raise ScenarioParseError(f"{path}: unknown key(s) {', '.join(unknown)}")
    missing = [k for k in keys if k not in obj and k not in optional]
    if missing:
        raise ScenarioParseError(f"{path}: missing key(s) {', '.join(missing)}")
    return obj


def _number(obj: dict, key: str, path: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _integer(obj: dict, key: str, path: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _list(obj: dict, key: str, path: str) -> list:
    value = obj[key]
    if not isinstance(value, list):
        raise ScenarioParseError(f"{path}.{key}: expected a list")
    return value


def scenario_from_dict(doc: Any) -> Scenario:
    """Build a scenario from a parsed document, enforcing the strict schema."""
    top = _section(doc, "scenario", _TOP_KEYS, optional={"horizon_s"})
    ch = _section(top["channel"], "channel", _CHANNEL_KEYS)
    cl = _section(top["cloud"], "cloud", _CLOUD_KEYS)
    channel = ChannelParams(*(_number(ch, k, "channel") for k in _CHANNEL_KEYS))
    cloud = CloudNode(*(_number(cl, k, "cloud") for k in _CLOUD_KEYS))

    rsus = []
    for j, raw in enumerate(_list(top, "rsus", "scenario")):
        path = f"rsus[{j}]"
        r = _section(raw, path, _RSU_KEYS, optional=_RSU_OPTIONAL)
        values = {k: _number(r, k, path) for k in _RSU_KEYS[1:] if k in r}
        rsus.append(RsuNode(id=_integer(r, "id", path), **values))

    vehicles = []
    for k, raw in enumerate(_list(top, "vehicles", "scenario")):
        path = f"vehicles[{k}]"
        v = _section(raw, path, _VEHICLE_KEYS)
        tasks = []
        for i, traw in enumerate(_list(v, "tasks", path)):
            tpath = f"{path}.tasks[{i}]"
            t = _section(traw, tpath, _TASK_KEYS, optional=_TASK_OPTIONAL)
            tasks.append(TaskSpec(**{key: _number(t, key, tpath) for key in _TASK_KEYS if key in t}))
        vehicles.append(VehicleNode(
            _integer(v, "id", path),
            *(_number(v, key, path) for key in _VEHICLE_KEYS[1:-1]),
            tasks=tuple(tasks),
        ))

    horizon = top.get("horizon_s")
    if horizon is not None:
        horizon = _number(top, "horizon_s", "scenario")
    return Scenario(tuple(vehicles), tuple(rsus), cloud, channel, horizon)


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def load_scenario(source: str | Path) -> Scenario:
    """Parse a scenario from JSON text or from a path to a JSON file."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps_scenario(scenario))
    return path


def reference_scenario() -> Scenario:
    """The committed 8-task scenario used by the verification suite."""
    return load_scenario(REFERENCE_SCENARIO_PATH)

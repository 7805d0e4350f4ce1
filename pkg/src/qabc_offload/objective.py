"""Total-latency objective with penalty handling for server capacity.

A decision vector holds one tier per task (0 local, 1 edge, 2 cloud), so the
"exactly one tier, binary choice" constraints hold by construction. Server
capacity (RSUs and cloud) is enforced through a penalty on the normalized
excess of booked cycles over each server's budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .latency import QUEUE_MODES, QueueState, UnreachableTierError, cloud_time, edge_time, local_time
from .scenario import Scenario

__all__ = [
    "LOCAL",
    "EDGE",
    "CLOUD",
    "TIER_NAMES",
    "ObjectiveWeights",
    "FitnessReport",
    "check_decision",
    "one_hot",
    "evaluate",
    "is_feasible",
]

LOCAL, EDGE, CLOUD = 0, 1, 2
TIER_NAMES = ("local", "edge", "cloud")


@dataclass(frozen=True)
class ObjectiveWeights:
    """Objective configuration.

    ``task_weights``, when given, overrides each task's own ``weight``
    (default 1). ``lambda_cap`` is charged
    per unit of (excess cycles / capacity cycles) on each server and
    ``lambda_deadline`` per missed deadline.
    """

    task_weights: tuple[float, ...] | None = None
    lambda_cap: float = 1e3
    lambda_deadline: float = 0.0
    queue_mode: str = "load_aware"
    q_edge_s: float = 0.0
    q_cloud_s: float = 0.0

    def __post_init__(self):
        if self.task_weights is not None:
            weights = tuple(float(w) for w in self.task_weights)
            if any(not (w > 0 and math.isfinite(w)) for w in weights):
                raise ValueError("task weights must be finite and > 0")
            object.__setattr__(self, "task_weights", weights)
        if self.lambda_cap < 0 or self.lambda_deadline < 0:
            raise ValueError("penalty coefficients must be >= 0")
        if self.queue_mode not in QUEUE_MODES:
            raise ValueError(f"queue_mode must be one of {QUEUE_MODES}, got {self.queue_mode!r}")
        if self.q_edge_s < 0 or self.q_cloud_s < 0:
            raise ValueError("constant queue times must be >= 0")


@dataclass(frozen=True)
class FitnessReport:
    total_latency_s: float
    per_task_s: tuple[float, ...]
    capacity_excess_cycles: dict[str, float]
    deadline_misses: int
    penalized_fitness: float


def check_decision(decision, n_tasks: int) -> tuple[int, ...]:
    """Validate a decision vector and return it as a tuple of ints."""
    tiers = tuple(int(x) for x in np.asarray(decision).ravel())
    if len(tiers) != n_tasks:
        raise ValueError(f"decision has {len(tiers)} entries, scenario has {n_tasks} tasks")
    if any(t not in (LOCAL, EDGE, CLOUD) for t in tiers):
        raise ValueError(f"decision entries must be in {{0, 1, 2}}, got {tiers}")
    return tiers


def one_hot(decision) -> np.ndarray:
    """(N_t, 3) indicator matrix with columns local/edge/cloud."""
    tiers = np.asarray(decision, dtype=int)
    return np.eye(3, dtype=int)[tiers]


def evaluate(scenario: Scenario, decision, weights: ObjectiveWeights | None = None) -> FitnessReport:
    """Score ``decision`` on ``scenario``.

    Tasks are processed in ascending global index against a fresh queue, so
    the result is a pure function of the arguments. An unreachable tier gives
    that task an infinite time instead of raising.
    """
    weights = weights or ObjectiveWeights()
    tiers = check_decision(decision, scenario.n_tasks)
    task_w = weights.task_weights
    if task_w is not None and len(task_w) != len(tiers):
        raise ValueError(f"{len(task_w)} task weights for {len(tiers)} tasks")

    queue = QueueState(weights.queue_mode, weights.q_edge_s, weights.q_cloud_s)
    channel, cloud = scenario.channel, scenario.cloud
    per_task = []
    total = 0.0
    misses = 0
    for i, ((vehicle, task), rsu, tier) in enumerate(zip(scenario.flat_tasks, scenario.task_rsus, tiers)):
        try:
            if tier == LOCAL:
                t = local_time(task, vehicle)
            elif tier == EDGE:
                t = edge_time(task, vehicle, rsu, channel, queue)
            else:
                t = cloud_time(task, vehicle, rsu, cloud, channel, queue)
        except UnreachableTierError:
            t = math.inf
        per_task.append(t)
        total += (task.weight if task_w is None else task_w[i]) * t
        if t > task.deadline_s:
            misses += 1

    excess = {}
    penalty = 0.0
    for rsu in scenario.rsus:
        over = max(0.0, queue.edge_cycles.get(rsu.id, 0.0) - rsu.cpu_capacity_cycles)
        excess[f"rsu:{rsu.id}"] = over
        penalty += over / rsu.cpu_capacity_cycles
    over = max(0.0, queue.cloud_cycles - cloud.cpu_capacity_cycles)
    excess["cloud"] = over
    penalty += over / cloud.cpu_capacity_cycles

    penalized = total + weights.lambda_cap * penalty + weights.lambda_deadline * misses
    return FitnessReport(total, tuple(per_task), excess, misses, penalized)


def is_feasible(report: FitnessReport) -> bool:
    return math.isfinite(report.total_latency_s) and all(
        v == 0 for v in report.capacity_excess_cycles.values()
    )

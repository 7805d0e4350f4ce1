"""Quantum-inspired artificial bee colony (QABC) search, plus reference solvers.

Randomness is organised as independent substreams keyed by
``(iteration, phase, index)`` under the run seed. Every individual (or
onlooker) therefore draws from its own stream, so evaluating a phase on a
thread pool yields exactly the same result as evaluating it sequentially.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field, replace

import numpy as np

from .objective import CLOUD, EDGE, LOCAL, ObjectiveWeights, evaluate
from .quantum import (
    DEFAULT_PHI,
    ObservationWeights,
    QuantumIndividual,
    collapse,
    neighbor,
    random_individual,
)
from .scenario import Scenario

__all__ = [
    "QabcParams",
    "BEST_LEVELS",
    "OptimizationResult",
    "substream",
    "run_qabc",
    "collapse_phase",
    "employee_phase",
    "onlooker_phase",
    "onlooker_probabilities",
    "scout_phase",
    "brute_force_oracle",
    "run_baseline",
    "BASELINES",
    "MAX_ORACLE_TASKS",
    "OracleSizeError",
]

MAX_ORACLE_TASKS = 12
BASELINES = ("all_local", "all_edge", "all_cloud", "uniform_random")
# Best levels of the L9 tuning experiment.
BEST_LEVELS = {"n_pop": 40, "n_iter": 20, "scout_limit": 15}

_SEL_EPS = 1e-12

# substream phase ids
_INIT, _COLLAPSE, _EMPLOYEE, _ONLOOKER_SELECT, _ONLOOKER, _SCOUT, _BASELINE = range(7)


class OracleSizeError(ValueError):
    pass


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class QabcParams:
    n_pop: int = BEST_LEVELS["n_pop"]
    n_iter: int = BEST_LEVELS["n_iter"]
    scout_limit: int = BEST_LEVELS["scout_limit"]
    phi: float = DEFAULT_PHI
    weights: ObservationWeights = ObservationWeights()
    seed: int = 0

    def __post_init__(self):
        for name, low in (("n_pop", 2), ("n_iter", 1), ("scout_limit", 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < low:
                raise ValueError(f"{name} must be an integer >= {low}, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (self.phi > 0 and math.isfinite(self.phi)):
            raise ValueError(f"phi must be finite and > 0, got {self.phi}")
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass
class OptimizationResult:
    best_decision: tuple[int, ...]
    best_fitness_s: float
    convergence: list[float] = field(default_factory=list)
    evaluations: int = 0
    method: str = "qabc"


class _Tracker:
    """Best-so-far decision and the number of fitness calls."""

    def __init__(self):
        self.best_fitness = math.inf
        self.best_decision = None
        self.evaluations = 0

    def offer(self, decision, fitness: float) -> None:
        self.evaluations += 1
        if fitness < self.best_fitness or self.best_decision is None:
            self.best_fitness = fitness
            self.best_decision = tuple(int(t) for t in decision)


class _Context:
    """Everything a phase needs besides the population."""

    def __init__(self, scenario: Scenario, params: QabcParams, objective: ObjectiveWeights | None,
                 iteration: int, tracker: _Tracker | None, executor: Executor | None):
        self.scenario = scenario
        self.params = params
        self.objective = objective or ObjectiveWeights()
        self.iteration = iteration
        self.tracker = tracker if tracker is not None else _Tracker()
        self.executor = executor

    def fitness(self, decision) -> float:
        return evaluate(self.scenario, decision, self.objective).penalized_fitness

    def stream(self, phase: int, index: int) -> np.random.Generator:
        return substream(self.params.seed, self.iteration, phase, index)

    def map(self, fn, items):
        if self.executor is None:
            return [fn(x) for x in items]
        return list(self.executor.map(fn, items))

    def probe(self, individual: QuantumIndividual, rng: np.random.Generator):
        """Rotate, collapse and score one neighbour of ``individual``."""
        cand = neighbor(individual, self.params.phi, rng)
        decision = collapse(cand, self.params.weights, rng)
        return cand, decision, self.fitness(decision)


def collapse_phase(population, scenario, params, *, iteration=0, objective=None,
                   tracker=None, executor=None) -> list[QuantumIndividual]:
    """Observe every individual once and store the decision and its fitness."""
    ctx = _Context(scenario, params, objective, iteration, tracker, executor)

    def work(a):
        decision = collapse(population[a], params.weights, ctx.stream(_COLLAPSE, a))
        return decision, ctx.fitness(decision)

    out = []
    for ind, (decision, fit) in zip(population, ctx.map(work, range(len(population)))):
        ctx.tracker.offer(decision, fit)
        out.append(replace(ind, decision=decision, fitness=fit))
    return out


def employee_phase(population, scenario, params, *, iteration=0, objective=None,
                   tracker=None, executor=None) -> list[QuantumIndividual]:
    """One neighbour per individual; keep it only on strict improvement."""
    ctx = _Context(scenario, params, objective, iteration, tracker, executor)
    trials = ctx.map(lambda a: ctx.probe(population[a], ctx.stream(_EMPLOYEE, a)),
                     range(len(population)))
    out = []
    for ind, (cand, decision, fit) in zip(population, trials):
        ctx.tracker.offer(decision, fit)
        if fit < ind.fitness:
            out.append(QuantumIndividual(cand.thetas, 0, decision, fit))
        else:
            out.append(ind)
    return out


def onlooker_probabilities(fitness) -> np.ndarray:
    """Selection probabilities proportional to ``1 / (f + 1e-12)``.

    Infinite fitness gets zero weight; if nothing is finite the choice is
    uniform.
    """
    f = np.asarray(fitness, dtype=float)
    inv = np.where(np.isfinite(f), 1.0 / (f + _SEL_EPS), 0.0)
    total = inv.sum()
    if not (total > 0 and math.isfinite(total)):
        return np.full(len(f), 1.0 / len(f))
    return inv / total


def onlooker_phase(population, scenario, params, *, iteration=0, objective=None,
                   tracker=None, executor=None) -> list[QuantumIndividual]:
    """``n_pop`` onlookers pick individuals by inverse fitness and try a neighbour.

    Onlookers landing on the same individual run in onlooker order against
    its latest state; distinct individuals are independent.
    """
    ctx = _Context(scenario, params, objective, iteration, tracker, executor)
    n = len(population)
    probs = onlooker_probabilities([ind.fitness for ind in population])
    u = ctx.stream(_ONLOOKER_SELECT, 0).random(n)
    picks = np.minimum(np.searchsorted(np.cumsum(probs), u, side="right"), n - 1)

    groups: dict[int, list[int]] = {}
    for k, a in enumerate(picks.tolist()):
        groups.setdefault(a, []).append(k)

    def work(a):
        current = population[a]
        trials = []
        for k in groups[a]:
            cand, decision, fit = ctx.probe(current, ctx.stream(_ONLOOKER, k))
            trials.append((k, decision, fit))
            if fit < current.fitness:
                current = QuantumIndividual(cand.thetas, 0, decision, fit)
        return current, trials

    out = list(population)
    all_trials = []
    for a, (current, trials) in zip(groups, ctx.map(work, list(groups))):
        out[a] = current
        all_trials.extend(trials)
    for _, decision, fit in sorted(all_trials, key=lambda t: t[0]):
        ctx.tracker.offer(decision, fit)
    return out


def scout_phase(population, params, *, iteration=0, n_tasks=None) -> list[QuantumIndividual]:
    """Re-seed individuals whose stagnation counter exceeds the limit; age the rest."""
    out = []
    for a, ind in enumerate(population):
        if ind.stagnation > params.scout_limit:
            rng = substream(params.seed, iteration, _SCOUT, a)
            out.append(random_individual(n_tasks or len(ind), rng))
        else:
            out.append(replace(ind, stagnation=ind.stagnation + 1))
    return out


def _executor(n_jobs):
    if n_jobs is None or n_jobs == 1:
        return nullcontext(None)
    workers = (os.cpu_count() or 1) if n_jobs < 0 else n_jobs
    return ThreadPoolExecutor(max_workers=max(1, workers))


def run_qabc(scenario: Scenario, params: QabcParams = QabcParams(),
             objective: ObjectiveWeights | None = None, n_jobs: int | None = None) -> OptimizationResult:
    """Run the bee colony for ``params.n_iter`` iterations.

    Each iteration collapses every individual, then runs the employee,
    onlooker and scout phases. The best decision over every evaluation is
    kept, so ``convergence`` never increases. ``n_jobs`` only changes how
    phases are scheduled, never the result.
    """
    objective = objective or ObjectiveWeights()
    n_tasks = scenario.n_tasks
    tracker = _Tracker()
    population = [random_individual(n_tasks, substream(params.seed, 0, _INIT, a))
                  for a in range(params.n_pop)]
    convergence = []
    with _executor(n_jobs) as pool:
        for it in range(params.n_iter):
            kw = dict(iteration=it, objective=objective, tracker=tracker, executor=pool)
            population = collapse_phase(population, scenario, params, **kw)
            population = employee_phase(population, scenario, params, **kw)
            population = onlooker_phase(population, scenario, params, **kw)
            population = scout_phase(population, params, iteration=it, n_tasks=n_tasks)
            convergence.append(tracker.best_fitness)
    return OptimizationResult(tracker.best_decision, tracker.best_fitness, convergence,
                              tracker.evaluations, "qabc")


def brute_force_oracle(scenario: Scenario, objective: ObjectiveWeights | None = None) -> OptimizationResult:
    """Exhaustive minimum over all ``3**N_t`` decisions.

    Enumeration is lexicographic and only strict improvements replace the
    incumbent, so ties resolve to the lexicographically smallest vector.
    """
    n = scenario.n_tasks
    if n > MAX_ORACLE_TASKS:
        raise OracleSizeError(f"oracle enumerates 3**N_t decisions; N_t={n} exceeds {MAX_ORACLE_TASKS}")
    objective = objective or ObjectiveWeights()
    tracker = _Tracker()
    for decision in itertools.product((LOCAL, EDGE, CLOUD), repeat=n):
        tracker.offer(decision, evaluate(scenario, decision, objective).penalized_fitness)
    return OptimizationResult(tracker.best_decision, tracker.best_fitness,
                              [tracker.best_fitness], tracker.evaluations, "oracle")


def run_baseline(scenario: Scenario, kind: str, seed: int = 0,
                 objective: ObjectiveWeights | None = None) -> OptimizationResult:
    """Score a fixed plan (all on one tier) or a uniformly random one."""
    n = scenario.n_tasks
    if kind == "all_local":
        decision = (LOCAL,) * n
    elif kind == "all_edge":
        decision = (EDGE,) * n
    elif kind == "all_cloud":
        decision = (CLOUD,) * n
    elif kind == "uniform_random":
        decision = tuple(substream(check_seed(seed), 0, _BASELINE, 0).integers(0, 3, size=n).tolist())
    else:
        raise ValueError(f"unknown baseline {kind!r}; choose from {BASELINES}")
    fit = evaluate(scenario, decision, objective).penalized_fitness
    return OptimizationResult(decision, fit, [fit], 1, kind)

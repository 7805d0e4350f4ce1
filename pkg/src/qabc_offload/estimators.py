"""scikit-learn style wrappers around the offloading solvers.

The "data" an estimator is fitted on is a :class:`~qabc_offload.scenario.Scenario`
(or anything :func:`check_scenario` accepts). ``predict`` returns the best
decision vector found, so the solvers compose with ``clone``, ``get_params``
and ``set_params`` like any other estimator::

    >>> from qabc_offload import QABCOffloader, reference_scenario
    >>> est = QABCOffloader(n_pop=20, random_state=3).fit(reference_scenario())
    >>> est.predict()
    array([0, 2, 2, 0, 0, 2, 0, 2])
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .objective import ObjectiveWeights, check_decision, evaluate
from .optimizer import (
    BASELINES,
    BEST_LEVELS,
    OptimizationResult,
    QabcParams,
    brute_force_oracle,
    run_baseline,
    run_qabc,
)
from .quantum import DEFAULT_PHI, ObservationWeights
from .scenario import Scenario, load_scenario, reference_scenario, scenario_from_dict

__all__ = [
    "check_scenario",
    "QABCOffloader",
    "BaselineOffloader",
    "ExhaustiveOffloader",
]


def check_scenario(X) -> Scenario:
    """Coerce a Scenario, a parsed document, JSON text, a file path, or ``"reference"``."""
    if isinstance(X, Scenario):
        return X
    if isinstance(X, dict):
        return scenario_from_dict(X)
    if isinstance(X, str) and X == "reference":
        return reference_scenario()
    if isinstance(X, (str, Path)):
        return load_scenario(X)
    raise TypeError(f"expected a Scenario, dict, JSON text or path; got {type(X).__name__}")


class _OffloaderBase(BaseEstimator):
    """Objective settings and the fitted-attribute protocol shared by all solvers."""

    def _objective(self) -> ObjectiveWeights:
        return ObjectiveWeights(
            task_weights=self.task_weights,
            lambda_cap=self.lambda_cap,
            lambda_deadline=self.lambda_deadline,
            queue_mode=self.queue_mode,
            q_edge_s=self.q_edge_s,
            q_cloud_s=self.q_cloud_s,
        )

    def _solve(self, scenario: Scenario) -> OptimizationResult:
        raise NotImplementedError

    def fit(self, X, y=None):
        scenario = check_scenario(X)
        result = self._solve(scenario)
        self.result_ = result
        self.best_decision_ = np.asarray(result.best_decision, dtype=int)
        self.best_fitness_ = result.best_fitness_s
        self.convergence_ = np.asarray(result.convergence, dtype=float)
        self.n_evaluations_ = result.evaluations
        self.n_tasks_ = scenario.n_tasks
        return self

    def predict(self, X=None):
        """Best decision vector; ``X``, if given, must have the fitted task count."""
        check_is_fitted(self, "best_decision_")
        if X is not None:
            scenario = check_scenario(X)
            if scenario.n_tasks != self.n_tasks_:
                raise ValueError(f"fitted on {self.n_tasks_} tasks, got {scenario.n_tasks}")
        return self.best_decision_.copy()

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()

    def report(self, X):
        check_is_fitted(self, "best_decision_")
        scenario = check_scenario(X)
        return evaluate(scenario, check_decision(self.best_decision_, scenario.n_tasks),
                        self._objective())

    def score(self, X, y=None) -> float:
        """Negative penalized fitness of the fitted plan on ``X`` (higher is better)."""
        return -self.report(X).penalized_fitness


class QABCOffloader(_OffloaderBase):
    """Quantum-inspired bee colony offloading optimizer.

    Defaults are the best L9 levels (``n_pop=40``, ``n_iter=20``,
    ``scout_limit=15``). ``random_state`` must be an integer seed so runs are
    reproducible; ``n_jobs`` schedules phase work on threads without changing
    the result.
    """

    def __init__(self, n_pop=BEST_LEVELS["n_pop"], n_iter=BEST_LEVELS["n_iter"],
                 scout_limit=BEST_LEVELS["scout_limit"], phi=DEFAULT_PHI,
                 eta0=0.5, eta1=0.2, eta2=0.3, task_weights=None, lambda_cap=1e3,
                 lambda_deadline=0.0, queue_mode="load_aware", q_edge_s=0.0,
                 q_cloud_s=0.0, random_state=0, n_jobs=None):
        self.n_pop = n_pop
        self.n_iter = n_iter
        self.scout_limit = scout_limit
        self.phi = phi
        self.eta0 = eta0
        self.eta1 = eta1
        self.eta2 = eta2
        self.task_weights = task_weights
        self.lambda_cap = lambda_cap
        self.lambda_deadline = lambda_deadline
        self.queue_mode = queue_mode
        self.q_edge_s = q_edge_s
        self.q_cloud_s = q_cloud_s
        self.random_state = random_state
        self.n_jobs = n_jobs

    def qabc_params(self) -> QabcParams:
        return QabcParams(
            n_pop=self.n_pop,
            n_iter=self.n_iter,
            scout_limit=self.scout_limit,
            phi=self.phi,
            weights=ObservationWeights(self.eta0, self.eta1, self.eta2),
            seed=self.random_state,
        )

    def _solve(self, scenario):
        return run_qabc(scenario, self.qabc_params(), self._objective(), n_jobs=self.n_jobs)


class BaselineOffloader(_OffloaderBase):
    """Fixed-tier or uniformly random plan, for comparison."""

    def __init__(self, strategy="all_cloud", task_weights=None, lambda_cap=1e3,
                 lambda_deadline=0.0, queue_mode="load_aware", q_edge_s=0.0,
                 q_cloud_s=0.0, random_state=0):
        self.strategy = strategy
        self.task_weights = task_weights
        self.lambda_cap = lambda_cap
        self.lambda_deadline = lambda_deadline
        self.queue_mode = queue_mode
        self.q_edge_s = q_edge_s
        self.q_cloud_s = q_cloud_s
        self.random_state = random_state

    def _solve(self, scenario):
        if self.strategy not in BASELINES:
            raise ValueError(f"strategy must be one of {BASELINES}, got {self.strategy!r}")
        return run_baseline(scenario, self.strategy, self.random_state, self._objective())


class ExhaustiveOffloader(_OffloaderBase):
    """Exact minimum by enumeration; only for small task counts."""

    def __init__(self, task_weights=None, lambda_cap=1e3, lambda_deadline=0.0,
                 queue_mode="load_aware", q_edge_s=0.0, q_cloud_s=0.0):
        self.task_weights = task_weights
        self.lambda_cap = lambda_cap
        self.lambda_deadline = lambda_deadline
        self.queue_mode = queue_mode
        self.q_edge_s = q_edge_s
        self.q_cloud_s = q_cloud_s

    def _solve(self, scenario):
        return brute_force_oracle(scenario, self._objective())

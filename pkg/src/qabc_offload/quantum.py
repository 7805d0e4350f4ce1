"""Qubit-angle encoding of offloading plans.

Each task is one qubit gene with angle ``theta`` in ``[0, pi/2]``; its
amplitudes are ``alpha = cos(theta)`` and ``beta = sin(theta)``. Observing a
gene picks local with weight ``(1 - beta^2) * eta0`` and edge / cloud with
weights ``beta^2 * eta1`` / ``beta^2 * eta2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HALF_PI",
    "DEFAULT_PHI",
    "ObservationWeights",
    "QuantumIndividual",
    "init_population",
    "random_individual",
    "tier_probabilities",
    "collapse",
    "neighbor",
]

HALF_PI = math.pi / 2
DEFAULT_PHI = 0.2 * math.pi


@dataclass(frozen=True)
class ObservationWeights:
    eta0: float = 0.5
    eta1: float = 0.2
    eta2: float = 0.3

    def __post_init__(self):
        if not all(w > 0 and math.isfinite(w) for w in (self.eta0, self.eta1, self.eta2)):
            raise ValueError(f"observation weights must be finite and > 0, got {self}")


@dataclass
class QuantumIndividual:
    """A vector of qubit angles plus the bookkeeping the bee colony needs.

    ``decision`` and ``fitness`` hold the most recent collapse of ``thetas``
    and its penalized fitness (``None`` / ``inf`` until first evaluated).
    """

    thetas: np.ndarray
    stagnation: int = 0
    decision: np.ndarray | None = None
    fitness: float = math.inf

    @property
    def alpha(self) -> np.ndarray:
        return np.cos(self.thetas)

    @property
    def beta(self) -> np.ndarray:
        return np.sin(self.thetas)

    def __len__(self) -> int:
        return len(self.thetas)


def random_individual(n_tasks: int, rng: np.random.Generator) -> QuantumIndividual:
    return QuantumIndividual(rng.uniform(0.0, HALF_PI, size=n_tasks))


def init_population(n_pop: int, n_tasks: int, rng: np.random.Generator) -> list[QuantumIndividual]:
    """``n_pop`` individuals with angles uniform on ``[0, pi/2]``."""
    if n_pop < 1 or n_tasks < 1:
        raise ValueError(f"population and task counts must be >= 1, got {n_pop}, {n_tasks}")
    return [random_individual(n_tasks, rng) for _ in range(n_pop)]


def tier_probabilities(beta_sq, weights: ObservationWeights = ObservationWeights()):
    """(p_local, p_edge, p_cloud) for squared beta amplitude(s).

    Works elementwise on arrays; scalars give a tuple of floats.
    """
    b2 = np.asarray(beta_sq, dtype=float)
    local = (1.0 - b2) * weights.eta0
    edge = b2 * weights.eta1
    cloud = b2 * weights.eta2
    norm = local + edge + cloud
    probs = (local / norm, edge / norm, cloud / norm)
    if b2.ndim == 0:
        return tuple(float(p) for p in probs)
    return probs


def collapse(individual: QuantumIndividual, weights: ObservationWeights,
             rng: np.random.Generator) -> np.ndarray:
    """Sample one tier per gene by inverse CDF over (local, edge, cloud)."""
    p_local, p_edge, _ = tier_probabilities(np.sin(individual.thetas) ** 2, weights)
    u = rng.random(len(individual.thetas))
    return (u >= p_local).astype(np.int8) + (u >= p_local + p_edge)


def neighbor(individual: QuantumIndividual, phi: float, rng: np.random.Generator) -> QuantumIndividual:
    """Rotate every angle by an independent ``U(-phi, phi)`` step, clamped to ``[0, pi/2]``."""
    if not phi > 0:
        raise ValueError(f"rotation magnitude phi must be > 0, got {phi}")
    step = rng.uniform(-phi, phi, size=len(individual.thetas))
    return QuantumIndividual(np.clip(individual.thetas + step, 0.0, HALF_PI))

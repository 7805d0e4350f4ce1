"""Quantum-inspired artificial bee colony (QABC) task offloading for vehicular edge computing."""
from .estimators import BaselineOffloader, ExhaustiveOffloader, QABCOffloader, check_scenario
from .objective import ObjectiveWeights, evaluate, is_feasible
from .optimizer import QabcParams, brute_force_oracle, run_baseline, run_qabc
from .quantum import ObservationWeights
from .scenario import GenerationParams, Scenario, generate_scenario, load_scenario, reference_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "BaselineOffloader",
    "ExhaustiveOffloader",
    "QABCOffloader",
    "check_scenario",
    "ObjectiveWeights",
    "evaluate",
    "is_feasible",
    "QabcParams",
    "brute_force_oracle",
    "run_baseline",
    "run_qabc",
    "ObservationWeights",
    "GenerationParams",
    "Scenario",
    "generate_scenario",
    "load_scenario",
    "reference_scenario",
    "save_scenario",
]

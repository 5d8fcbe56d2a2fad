"""Multi-objective UAV deployment and task offloading for forest IoT, solved
with an improved multi-objective grey wolf optimizer."""

from .encoding import ObjectiveVector, Solution, evaluate, evaluate_batch, random_solution
from .optimizer import RunReport, SolverConfig, Variant, run, run_repeated
from .pareto import Archive, dominates, igd, normalize
from .scenario import Scenario, ScenarioConfig, generate_scenario, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "ObjectiveVector",
    "RunReport",
    "Scenario",
    "ScenarioConfig",
    "Solution",
    "SolverConfig",
    "Variant",
    "dominates",
    "evaluate",
    "evaluate_batch",
    "generate_scenario",
    "igd",
    "load_scenario",
    "normalize",
    "random_solution",
    "run",
    "run_repeated",
    "save_scenario",
]

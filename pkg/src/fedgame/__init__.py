"""Contribution games for collaborative learning: models, equilibria and a federated surrogate."""

from .coverage import CoverageModel, UnattainableError
from .linear import LinearModel, ModelError, from_discovery
from .model import Instance, StrategySpace, dumps_instance, evaluate, loads_instance
from .prices import price_of_fairness, price_of_stability
from .solvers import (SolveReport, SolverError, best_response_dynamics, optimal_stable_eq,
                      optimal_uniform_envy_free, social_opt)
from .tabular import TabularModel
from .verify import Verdict, is_envy_free, is_stable_equilibrium, verify

__all__ = [
    "CoverageModel", "Instance", "LinearModel", "ModelError", "SolveReport", "SolverError", "StrategySpace",
    "TabularModel", "UnattainableError", "Verdict", "best_response_dynamics", "dumps_instance", "evaluate",
    "from_discovery", "is_envy_free", "is_stable_equilibrium", "loads_instance", "optimal_stable_eq",
    "optimal_uniform_envy_free", "price_of_fairness", "price_of_stability", "social_opt", "verify",
]

"""Stackelberg graphon games of rumor spreading.

Equilibrium solver for a four-state rumor model on graphon-coupled
populations (coupled forward-backward ODE fixed point), principal-level
policy optimization (single leader and duo-leader Nash), and an exact
finite-player jump simulator for validating the mean-field densities.
"""

from .graphon import (GraphonSpec, AgentPopulation, eval_graphon,
                      sample_population)
from .model import (StateE, ModelParams, PolicyPath, AggregatePair,
                    qmatrix_single, qmatrix_duo, running_cost,
                    optimal_control, hamiltonian, compute_aggregates,
                    split_lambdas, SINGLE, DUO)
from .fbode import (TimeGrid, EquilibriumSolution, solve_kfp, solve_hjb,
                    ggne_fixed_point, check_short_time, agent_cost,
                    aggregate_field, StabilityError, DivergedError)
from .principal import (PolicyGrid, CostMatrix, StackelbergResult,
                        principal_cost_single, principal_costs_duo,
                        solve_sgge, build_cost_matrix, solve_dsge,
                        GridSearchFailure)
from .finite_player import (SimConfig, EmpiricalFlow, simulate,
                            empirical_aggregates, compute_rate_cap,
                            RateCapError)
from .config import ExperimentConfig, ConfigError, load_config

__version__ = "0.1.0"

__all__ = [
    "GraphonSpec", "AgentPopulation", "eval_graphon", "sample_population",
    "StateE", "ModelParams", "PolicyPath", "AggregatePair",
    "qmatrix_single", "qmatrix_duo", "running_cost", "optimal_control",
    "split_lambdas",
    "hamiltonian", "compute_aggregates", "SINGLE", "DUO",
    "TimeGrid", "EquilibriumSolution", "solve_kfp", "solve_hjb",
    "ggne_fixed_point", "check_short_time", "agent_cost",
    "aggregate_field", "StabilityError", "DivergedError",
    "PolicyGrid", "CostMatrix", "StackelbergResult",
    "principal_cost_single", "principal_costs_duo", "solve_sgge",
    "build_cost_matrix", "solve_dsge", "GridSearchFailure",
    "SimConfig", "EmpiricalFlow", "simulate", "empirical_aggregates",
    "compute_rate_cap", "RateCapError",
    "ExperimentConfig", "ConfigError", "load_config",
]

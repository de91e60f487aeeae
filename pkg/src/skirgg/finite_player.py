"""Finite-population jump-process simulator on the sampled weighted graph.

Players evolve as a coupled continuous-time Markov chain whose rates are
built from the same rate matrices as the mean-field solver, but with the
empirical aggregates Z_K^{j,N} = (1/N) sum_i w_ij alpha_i 1{X_i = K}.
Events are generated exactly by thinning against a dominating rate, so
there is no discretization bias; controls are read piecewise-constant from
a precomputed field (typically the equilibrium control field).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import split_lambdas

EQUILIBRIUM_FIELD = "equilibrium_field"
CONSTANT_ONE = "constant_one"


class RateCapError(RuntimeError):
    """A realized jump rate exceeded the thinning bound."""


@dataclass(frozen=True)
class SimConfig:
    n_players: int
    n_paths: int
    seed: int
    rate_cap: float = None        # None: computed from controls and params
    control_source: str = EQUILIBRIUM_FIELD

    def __post_init__(self):
        if self.n_players < 1:
            raise ValueError("n_players must be at least 1")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if self.rate_cap is not None and self.rate_cap <= 0:
            raise ValueError("an explicit rate_cap must be positive")
        if self.control_source not in (EQUILIBRIUM_FIELD, CONSTANT_ONE):
            raise ValueError(
                f"unknown control_source: {self.control_source!r}")


@dataclass(frozen=True, eq=False)
class EmpiricalFlow:
    """Population state fractions and aggregate traces at grid nodes."""

    fractions: np.ndarray         # (nodes, 4), mean over paths
    per_path: np.ndarray          # (n_paths, nodes, 4)
    z_mean: np.ndarray            # (nodes, 2), player-mean aggregates
    rate_cap: float


def empirical_aggregates(states, controls_t, weights):
    """Exact finite sums (Z_K, Z_I) per player from a state snapshot.

    states: (N,) ints; controls_t: (N, 4) per-player controls at the
    current instant; weights: (N, N) interaction matrix.
    """
    states = np.asarray(states)
    controls_t = np.asarray(controls_t, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n = states.shape[0]
    alpha = controls_t[np.arange(n), states]
    m_k = alpha * (states == 1)
    m_i = alpha * (states == 2)
    z = np.empty((n, 2))
    z[:, 0] = m_k @ weights / n
    z[:, 1] = m_i @ weights / n
    return z


def compute_rate_cap(pop, params, controls, psi_k_max, psi_i_max,
                     type_of, n_players):
    """Dominating bound on any player's total exit rate.

    Uses the actual max control in the field (sharper than the a priori
    control cap) and the joint bound z_K + z_I <= alpha_max * mean_i w_ij,
    valid because each player occupies one state at a time.
    """
    alpha_max = float(np.max(controls))
    n_type = np.bincount(type_of, minlength=pop.n_agents)
    wbar = pop.weight_matrix @ n_type / n_players
    zb = alpha_max * wbar
    rate_s = params.beta_s * alpha_max * zb + psi_k_max + psi_i_max
    rate_k = params.beta_k * alpha_max * zb + psi_i_max + params.mu_k
    rate_i = params.beta_i * alpha_max * zb + psi_k_max + params.mu_i
    cap = max(rate_s.max(), rate_k.max(), rate_i.max(), params.eta.max())
    return float(cap), wbar


def simulate(pop, params, lambdas, controls, grid, sim_config: SimConfig,
             p0, type_of=None) -> EmpiricalFlow:
    """Run n_paths independent replications of the N-player chain.

    type_of maps players to agent indices in pop (types share graphon row,
    rates, controls, and initial distribution); by default n_players must
    equal the population size and the map is the identity. p0 is the
    initial state distribution, (4,) shared or (n_agents, 4).
    """
    n_agents = pop.n_agents
    params = params.expand(n_agents)
    n_players = sim_config.n_players
    if type_of is None:
        if n_players != n_agents:
            raise ValueError(
                "n_players differs from the population size; pass type_of "
                "to map players onto agent types")
        type_of = np.arange(n_players, dtype=np.int64)
    else:
        type_of = np.asarray(type_of, dtype=np.int64)
        if type_of.shape != (n_players,):
            raise ValueError("type_of must have shape (n_players,)")
        if type_of.min() < 0 or type_of.max() >= n_agents:
            raise ValueError("type_of entries must index the population")

    nodes = grid.n_nodes
    if sim_config.control_source == CONSTANT_ONE:
        controls = np.ones((n_agents, nodes, 4))
    else:
        controls = np.ascontiguousarray(controls, dtype=float)
        if controls.shape != (n_agents, nodes, 4):
            raise ValueError("control field must be (n_agents, nodes, 4)")

    phi_k, psi_k, phi_i, psi_i = _policy_nodes(lambdas, nodes)

    p0 = np.asarray(p0, dtype=float)
    if p0.ndim == 1:
        p0 = np.tile(p0, (n_agents, 1))
    if p0.shape != (n_agents, 4):
        raise ValueError("initial distribution must be (4,) or (n_agents, 4)")

    cap_auto, wbar = compute_rate_cap(
        pop, params, controls, float(psi_k.max()), float(psi_i.max()),
        type_of, n_players)
    rate_cap = sim_config.rate_cap if sim_config.rate_cap is not None \
        else cap_auto

    frac, zmean, status = kernels.mc_paths(
        np.ascontiguousarray(pop.weight_matrix, dtype=float), type_of,
        np.ascontiguousarray(p0), controls,
        np.ascontiguousarray(psi_k), np.ascontiguousarray(psi_i),
        params.beta_s, params.beta_k, params.beta_i,
        params.mu_k, params.mu_i, params.eta,
        grid.nodes(), float(rate_cap), sim_config.n_paths,
        int(sim_config.seed), wbar)
    if status == kernels.STATUS_RATECAP:
        raise RateCapError(
            f"a realized exit rate exceeded rate_cap={rate_cap:g}; the "
            "thinning bound does not dominate the process")
    return EmpiricalFlow(fractions=frac.mean(axis=0), per_path=frac,
                         z_mean=zmean.mean(axis=0), rate_cap=float(rate_cap))


def _policy_nodes(lambdas, nodes):
    lam_k, lam_i = split_lambdas(lambdas)
    lam_k = lam_k.resize(nodes)
    if lam_i is None:
        zeros = np.zeros(nodes)
        return lam_k.phi, lam_k.psi, zeros, zeros
    lam_i = lam_i.resize(nodes)
    return lam_k.phi, lam_k.psi, lam_i.phi, lam_i.psi

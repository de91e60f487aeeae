"""Four-state rumor model: rate matrices, costs, and equilibrium controls.

States: S (uninformed), K (spreading preferred news), I (spreading
non-preferred news), R (uninterested). Agents pick a communication level
alpha; a principal's policy is a pair lambda = (phi, psi) where phi rewards
agents in the principal's preferred state and psi boosts transition rates
into it.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

import numpy as np

N_STATES = 4

SINGLE = "single"
DUO = "duo"


class StateE(IntEnum):
    """Fixed state ordering used for every matrix and vector layout."""

    S = 0
    K = 1
    I = 2
    R = 3


class AggregatePair(NamedTuple):
    """Graphon-weighted neighbor communication mass in states K and I."""

    z_k: float
    z_i: float


# =====================================================================
# Parameters
# =====================================================================

@dataclass(frozen=True, eq=False)
class ModelParams:
    """Per-agent transition rates plus shared bounds and cost scales.

    Rate fields are arrays of one value per agent (a single shared value is
    broadcast). beta_* are meeting intensities active in states S/K/I, mu_*
    drain K and I into R, eta returns R to S. a_bar caps the agents'
    controls, phi_bar and psi_bar cap the policy components, c_lambda
    scales the principal's quadratic policy cost.
    """

    beta_s: np.ndarray
    beta_k: np.ndarray
    beta_i: np.ndarray
    mu_k: np.ndarray
    mu_i: np.ndarray
    eta: np.ndarray
    a_bar: float = 5.0
    phi_bar: float = 0.5
    psi_bar: float = 0.5
    c_lambda: float = 1.0

    def __post_init__(self):
        rates = {}
        for name in ("beta_s", "beta_k", "beta_i", "mu_k", "mu_i", "eta"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a scalar or 1-d array")
            rates[name] = arr
        n = max(a.shape[0] for a in rates.values())
        for name, arr in rates.items():
            if arr.shape[0] == 1 and n > 1:
                arr = np.full(n, arr[0])
            elif arr.shape[0] != n:
                raise ValueError(
                    f"{name} has length {arr.shape[0]}, expected 1 or {n}")
            object.__setattr__(self, name, arr)
        for name in ("beta_s", "beta_k", "beta_i", "mu_k", "mu_i", "eta"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be nonnegative")
        if self.a_bar <= 0:
            raise ValueError("a_bar must be positive")
        if self.phi_bar < 0 or self.psi_bar < 0:
            raise ValueError("policy bounds must be nonnegative")
        if self.c_lambda <= 0:
            raise ValueError("c_lambda must be positive")

    @property
    def n_agents(self) -> int:
        return self.beta_s.shape[0]

    def expand(self, n: int) -> "ModelParams":
        """Broadcast shared (length-1) rates to an n-agent population."""
        if self.n_agents == n:
            return self
        if self.n_agents != 1:
            raise ValueError(
                f"params sized for {self.n_agents} agents, population has {n}")
        return ModelParams(
            beta_s=np.full(n, self.beta_s[0]),
            beta_k=np.full(n, self.beta_k[0]),
            beta_i=np.full(n, self.beta_i[0]),
            mu_k=np.full(n, self.mu_k[0]),
            mu_i=np.full(n, self.mu_i[0]),
            eta=np.full(n, self.eta[0]),
            a_bar=self.a_bar, phi_bar=self.phi_bar,
            psi_bar=self.psi_bar, c_lambda=self.c_lambda)

    def take(self, order) -> "ModelParams":
        """Re-index the per-agent rates (used to expand types to players)."""
        return ModelParams(
            beta_s=self.beta_s[order], beta_k=self.beta_k[order],
            beta_i=self.beta_i[order], mu_k=self.mu_k[order],
            mu_i=self.mu_i[order], eta=self.eta[order],
            a_bar=self.a_bar, phi_bar=self.phi_bar,
            psi_bar=self.psi_bar, c_lambda=self.c_lambda)

    @classmethod
    def from_groups(cls, group_table: dict, group_of, **scalars) -> "ModelParams":
        """Expand per-group rate rows to per-agent arrays via group ids."""
        g = np.asarray(group_of, dtype=int)
        fields = {}
        for name in ("beta_s", "beta_k", "beta_i", "mu_k", "mu_i", "eta"):
            per_group = np.asarray(group_table[name], dtype=float)
            fields[name] = per_group[g]
        return cls(**fields, **scalars)


@dataclass(frozen=True, eq=False)
class PolicyPath:
    """A principal's policy lambda = (phi, psi) tabulated on the time grid."""

    phi: np.ndarray
    psi: np.ndarray
    constant: bool = False

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        psi = np.atleast_1d(np.asarray(self.psi, dtype=float))
        if phi.shape != psi.shape:
            raise ValueError("phi and psi paths must share a shape")
        if np.any(phi < 0) or np.any(psi < 0):
            raise ValueError("policy components must be nonnegative")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @classmethod
    def constant_policy(cls, phi: float, psi: float, n_nodes: int) -> "PolicyPath":
        return cls(phi=np.full(n_nodes, float(phi)),
                   psi=np.full(n_nodes, float(psi)), constant=True)

    @classmethod
    def zero(cls, n_nodes: int) -> "PolicyPath":
        return cls.constant_policy(0.0, 0.0, n_nodes)

    def resize(self, n_nodes: int) -> "PolicyPath":
        if self.phi.shape[0] == n_nodes:
            return self
        if self.constant:
            return PolicyPath.constant_policy(self.phi[0], self.psi[0], n_nodes)
        raise ValueError("time-varying policy does not match the grid")


def validate_policy(policy: PolicyPath, params: ModelParams):
    if np.any(policy.phi > params.phi_bar + 1e-12):
        raise ValueError("phi path exceeds phi_bar")
    if np.any(policy.psi > params.psi_bar + 1e-12):
        raise ValueError("psi path exceeds psi_bar")


def split_lambdas(lambdas):
    """Normalize a single policy or a (K, I) pair to the duo layout.

    Returns (policy_K, policy_I_or_None); the single-principal case is the
    duo case with the I-principal's policy absent (identically zero).
    """
    if isinstance(lambdas, PolicyPath):
        return lambdas, None
    if (isinstance(lambdas, (tuple, list)) and len(lambdas) == 2
            and all(isinstance(v, PolicyPath) for v in lambdas)):
        lam_k, lam_i = lambdas
        return lam_k, lam_i
    raise TypeError("lambdas must be a PolicyPath or a pair of PolicyPaths")


# =====================================================================
# Rate matrices
# =====================================================================

def _q_fill(alpha_row, z_k, z_i, psi_k, psi_i, bs, bk, bi, mk, mi, et):
    # alpha_row[e] is the control used while sitting in state e
    q = np.zeros((N_STATES, N_STATES))
    q[0, 1] = bs * alpha_row[0] * z_k + psi_k
    q[0, 2] = bs * alpha_row[0] * z_i + psi_i
    q[1, 2] = bk * alpha_row[1] * z_i + psi_i
    q[1, 3] = mk
    q[2, 1] = bi * alpha_row[2] * z_k + psi_k
    q[2, 3] = mi
    q[3, 0] = et
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def _check_q_inputs(alpha, z):
    if np.any(np.asarray(alpha) < 0):
        raise ValueError("control alpha must be nonnegative")
    if z[0] < 0 or z[1] < 0:
        raise ValueError("aggregates must be nonnegative")


def qmatrix_single(alpha, z, lam, params: ModelParams, agent: int = 0):
    """Transition-rate matrix under one principal's policy lam = (phi, psi).

    alpha may be a scalar (one control in every state) or a length-4 row of
    per-state controls. phi does not enter the rates, only psi does.
    """
    _check_q_inputs(alpha, z)
    alpha_row = np.broadcast_to(np.asarray(alpha, dtype=float), (N_STATES,))
    _, psi = lam
    return _q_fill(alpha_row, z[0], z[1], psi, 0.0,
                   params.beta_s[agent], params.beta_k[agent],
                   params.beta_i[agent], params.mu_k[agent],
                   params.mu_i[agent], params.eta[agent])


def qmatrix_duo(alpha, z, lam_k, lam_i, params: ModelParams, agent: int = 0):
    """Rate matrix with both principals pushing toward their own states."""
    _check_q_inputs(alpha, z)
    alpha_row = np.broadcast_to(np.asarray(alpha, dtype=float), (N_STATES,))
    return _q_fill(alpha_row, z[0], z[1], lam_k[1], lam_i[1],
                   params.beta_s[agent], params.beta_k[agent],
                   params.beta_i[agent], params.mu_k[agent],
                   params.mu_i[agent], params.eta[agent])


# =====================================================================
# Costs and controls
# =====================================================================

def running_cost(mode: str, e: int, alpha, phis):
    """Instantaneous cost: quadratic effort minus state-contingent rewards.

    phis is (phi_K,) in single mode, (phi_K, phi_I) in duo mode.
    alpha may be a scalar or an ndarray of candidate controls.
    """
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0):
        raise ValueError("control alpha must be nonnegative")
    cost = 0.5 * (1.0 - a) ** 2
    if e == StateE.K:
        cost = cost - phis[0] * a
    if mode == DUO and e == StateE.I:
        cost = cost - phis[1] * a
    return float(cost) if cost.ndim == 0 else cost


def optimal_control(mode: str, e: int, z, u_row, phis,
                    params: ModelParams, agent: int = 0) -> float:
    """Closed-form minimizer of the Hamiltonian, projected onto [0, a_bar].

    The unconstrained first-order value per state:
      S: 1 + beta_S [z_K (u_S - u_K) + z_I (u_S - u_I)]
      K: 1 + phi_K + beta_K z_I (u_K - u_I)
      I: 1 (+ phi_I in duo mode) + beta_I z_K (u_I - u_K)
      R: 1
    Projection is exact because the Hamiltonian is strictly convex in alpha.
    """
    z_k, z_i = z[0], z[1]
    u = np.asarray(u_row, dtype=float)
    if e == StateE.S:
        a = 1.0 + params.beta_s[agent] * (z_k * (u[0] - u[1])
                                          + z_i * (u[0] - u[2]))
    elif e == StateE.K:
        a = 1.0 + phis[0] + params.beta_k[agent] * z_i * (u[1] - u[2])
    elif e == StateE.I:
        phi_i = phis[1] if mode == DUO else 0.0
        a = 1.0 + phi_i + params.beta_i[agent] * z_k * (u[2] - u[1])
    else:
        a = 1.0
    return float(min(max(a, 0.0), params.a_bar))


def _lam_scalars(lam):
    # accepts a PolicyPath (first node) or a bare (phi, psi) pair
    if isinstance(lam, PolicyPath):
        return float(lam.phi[0]), float(lam.psi[0])
    phi, psi = lam
    return float(phi), float(psi)


def hamiltonian(mode: str, e: int, z, u_row, alpha, lambdas,
                params: ModelParams, agent: int = 0):
    """Q-row-weighted value sum plus running cost, at a given control.

    lambdas is one policy in single mode and a (K, I) pair in duo mode;
    each policy may be a PolicyPath or a bare (phi, psi) tuple.  alpha
    may be a scalar or a 1-d array of candidate controls; rates are
    affine in the control, so array evaluation needs two matrix builds.
    """
    if mode == DUO:
        lam_k, lam_i = lambdas
        phi_k, psi_k = _lam_scalars(lam_k)
        phi_i, psi_i = _lam_scalars(lam_i)
        phis = (phi_k, phi_i)
    else:
        phi_k, psi_k = _lam_scalars(lambdas)
        phi_i, psi_i = 0.0, 0.0
        phis = (phi_k,)

    def qrow(a: float) -> np.ndarray:
        if mode == DUO:
            return qmatrix_duo(a, z, (phi_k, psi_k), (phi_i, psi_i),
                               params, agent)[e]
        return qmatrix_single(a, z, (phi_k, psi_k), params, agent)[e]

    u = np.asarray(u_row, dtype=float)
    a = np.asarray(alpha, dtype=float)
    if a.ndim == 0:
        return float(qrow(float(a)) @ u + running_cost(mode, e, float(a), phis))
    lin0 = qrow(0.0) @ u
    lin1 = qrow(1.0) @ u
    return lin0 + a * (lin1 - lin0) + running_cost(mode, e, a, phis)


def compute_aggregates(pop, theta_t: np.ndarray, p_t: np.ndarray) -> np.ndarray:
    """Per-agent aggregates (Z_K, Z_I) at one instant.

    Z_K[x] = (1/n) sum_y W[x, y] * theta_t[y, K] * p_t[y, K], and Z_I
    analogously; theta_t and p_t are (n, 4) snapshots.
    """
    w = pop.weight_matrix
    n = w.shape[0]
    theta_t = np.asarray(theta_t, dtype=float)
    p_t = np.asarray(p_t, dtype=float)
    if theta_t.shape != (n, N_STATES) or p_t.shape != (n, N_STATES):
        raise ValueError("theta and p snapshots must have shape (n_agents, 4)")
    z = np.empty((n, 2))
    z[:, 0] = w @ (theta_t[:, StateE.K] * p_t[:, StateE.K]) / n
    z[:, 1] = w @ (theta_t[:, StateE.I] * p_t[:, StateE.I]) / n
    return z

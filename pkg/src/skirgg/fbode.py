"""Coupled forward-backward ODE solver for the graphon game equilibrium.

The forward leg is the Kolmogorov-Fokker-Planck system dp/dt = p Q, the
backward leg the Hamilton-Jacobi-Bellman system du/dt = -H with u(T) = 0.
ggne_fixed_point iterates: aggregates from (theta, p), controls from u,
forward sweep, backward sweep, until the sup-norm change of (u, p) drops
below tolerance.

Fields are tabulated at grid nodes; the ODE right-hand sides hold the node
values of Z, theta, and lambda constant across each step (left endpoint).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (ModelParams, PolicyPath, split_lambdas, validate_policy,
                    N_STATES)

RK4 = "rk4"
EULER = "euler"


class StabilityError(ValueError):
    """Step size too large for the explicit scheme at the given rates."""


class DivergedError(RuntimeError):
    """Non-finite values appeared during integration or iteration."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] with n_steps intervals (n_steps + 1 nodes)."""

    T: float
    n_steps: int

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        if self.n_steps < 2:
            raise ValueError("need at least 2 time steps")

    @property
    def dt(self) -> float:
        return self.T / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_nodes)


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    """Converged (or best-effort) equilibrium bundle with diagnostics."""

    u: np.ndarray                 # (n, nodes, 4) values, u[:, -1] = 0
    p: np.ndarray                 # (n, nodes, 4) densities on the simplex
    z: np.ndarray                 # (n, nodes, 2) aggregates (Z_K, Z_I)
    theta: np.ndarray             # (n, nodes, 4) controls in [0, a_bar]
    iterations: int
    residual_history: np.ndarray
    converged: bool


def _policy_arrays(lambdas, n_nodes):
    """Split a policy or pair into (phi_k, psi_k, phi_i, psi_i) node arrays."""
    lam_k, lam_i = split_lambdas(lambdas)
    lam_k = lam_k.resize(n_nodes)
    phi_k, psi_k = lam_k.phi, lam_k.psi
    if lam_i is None:
        zeros = np.zeros(n_nodes)
        return phi_k, psi_k, zeros, zeros
    lam_i = lam_i.resize(n_nodes)
    return phi_k, psi_k, lam_i.phi, lam_i.psi


def _prepare_p0(p0, n_agents):
    p0 = np.asarray(p0, dtype=float)
    if p0.ndim == 1:
        p0 = np.tile(p0, (n_agents, 1))
    if p0.shape != (n_agents, N_STATES):
        raise ValueError("initial distribution must be (4,) or (n_agents, 4)")
    if np.any(p0 < -1e-12) or np.any(np.abs(p0.sum(axis=1) - 1.0) > 1e-8):
        raise ValueError("initial distribution must lie on the simplex")
    return np.clip(p0, 0.0, None)


def _check_fields(pop, params, theta, z, grid):
    n = pop.n_agents
    shape_th = (n, grid.n_nodes, N_STATES)
    shape_z = (n, grid.n_nodes, 2)
    if theta.shape != shape_th:
        raise ValueError(f"theta field must have shape {shape_th}")
    if z.shape != shape_z:
        raise ValueError(f"aggregate field must have shape {shape_z}")


def _stability_guard(params, theta, z, psi_k, psi_i, dt):
    # explicit-scheme criterion: max total exit rate times dt below 1
    bs = params.beta_s[:, None]
    bk = params.beta_k[:, None]
    bi = params.beta_i[:, None]
    exit_s = bs * theta[:, :, 0] * (z[:, :, 0] + z[:, :, 1]) + psi_k + psi_i
    exit_k = bk * theta[:, :, 1] * z[:, :, 1] + psi_i + params.mu_k[:, None]
    exit_i = bi * theta[:, :, 2] * z[:, :, 0] + psi_k + params.mu_i[:, None]
    exit_r = np.broadcast_to(params.eta[:, None], exit_s.shape)
    worst = max(exit_s.max(), exit_k.max(), exit_i.max(), exit_r.max())
    if worst * dt >= 1.0:
        raise StabilityError(
            f"dt={dt:g} too large for max exit rate {worst:g}; "
            "refine the time grid")


def aggregate_field(pop, theta, p):
    """Aggregates (Z_K, Z_I) for every agent and node from full fields."""
    n = pop.n_agents
    v_k = theta[:, :, 1] * p[:, :, 1]
    v_i = theta[:, :, 2] * p[:, :, 2]
    z = np.empty((n, theta.shape[1], 2))
    z[:, :, 0] = pop.weight_matrix @ v_k / n
    z[:, :, 1] = pop.weight_matrix @ v_i / n
    return z


def solve_kfp(pop, params, theta, z, lambdas, grid, p0, method=RK4):
    """Integrate the density flow forward under given controls and field."""
    params = params.expand(pop.n_agents)
    theta = np.ascontiguousarray(theta, dtype=float)
    z = np.ascontiguousarray(z, dtype=float)
    _check_fields(pop, params, theta, z, grid)
    phi_k, psi_k, phi_i, psi_i = _policy_arrays(lambdas, grid.n_nodes)
    p0 = _prepare_p0(p0, pop.n_agents)
    _stability_guard(params, theta, z, psi_k, psi_i, grid.dt)
    p, status = kernels.kfp_sweep(
        p0, theta, z, psi_k, psi_i,
        params.beta_s, params.beta_k, params.beta_i,
        params.mu_k, params.mu_i, params.eta,
        grid.dt, method == RK4)
    if status == kernels.STATUS_NONFINITE:
        raise DivergedError("forward sweep produced non-finite densities")
    if status == kernels.STATUS_NEGATIVE:
        raise DivergedError(
            "forward sweep produced densities below -1e-10; the step size "
            "is too large for the realized rates")
    return p


def solve_hjb(pop, params, z, lambdas, grid, method=RK4):
    """Integrate values backward from u(T) = 0, minimizing controls on the
    fly; returns (u, theta) with theta the induced control field."""
    params = params.expand(pop.n_agents)
    z = np.ascontiguousarray(z, dtype=float)
    theta_probe = np.zeros((pop.n_agents, grid.n_nodes, N_STATES))
    _check_fields(pop, params, theta_probe, z, grid)
    if not np.all(np.isfinite(z)):
        raise DivergedError("aggregate field contains non-finite values")
    phi_k, psi_k, phi_i, psi_i = _policy_arrays(lambdas, grid.n_nodes)
    u, theta, status = kernels.hjb_sweep(
        z, phi_k, psi_k, phi_i, psi_i,
        params.beta_s, params.beta_k, params.beta_i,
        params.mu_k, params.mu_i, params.eta,
        grid.dt, method == RK4, params.a_bar)
    if status == kernels.STATUS_NONFINITE:
        raise DivergedError("backward sweep produced non-finite values")
    return u, theta


def ggne_fixed_point(pop, params, lambdas, grid, p0, tol=1e-6,
                     max_iter=500, damping=1.0, method=RK4):
    """Fixed-point iteration over aggregates and controls.

    Starts from theta = 1 everywhere, p frozen at p0, u = 0. Each pass:
    damped aggregate update from the previous (theta, p), controls from the
    previous u, forward sweep, backward sweep. The residual is the max of
    the sup-norm changes of u and p. Non-convergence inside max_iter is
    reported through converged=False, never raised; non-finite iterates
    raise DivergedError.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    n = pop.n_agents
    params = params.expand(n)
    lam_k, lam_i = split_lambdas(lambdas)
    validate_policy(lam_k, params)
    if lam_i is not None:
        validate_policy(lam_i, params)

    p0 = _prepare_p0(p0, n)
    nodes = grid.n_nodes
    theta = np.ones((n, nodes, N_STATES))
    p = np.repeat(p0[:, None, :], nodes, axis=1)
    u = np.zeros((n, nodes, N_STATES))
    z = None
    residuals = []
    converged = False
    iterations = 0
    for it in range(1, max_iter + 1):
        iterations = it
        z_cand = aggregate_field(pop, theta, p)
        z = z_cand if z is None else (1.0 - damping) * z + damping * z_cand
        theta_mid = _control_field(params, u, z,
                                   *_policy_arrays(lambdas, nodes))
        p_new = solve_kfp(pop, params, theta_mid, z, lambdas, grid, p0,
                          method=method)
        u_new, theta = solve_hjb(pop, params, z, lambdas, grid,
                                 method=method)
        if not (np.all(np.isfinite(p_new)) and np.all(np.isfinite(u_new))):
            raise DivergedError("fixed-point iterate became non-finite")
        residual = max(np.abs(u_new - u).max(), np.abs(p_new - p).max())
        residuals.append(residual)
        u, p = u_new, p_new
        if residual <= tol:
            converged = True
            break
    return EquilibriumSolution(
        u=u, p=p, z=z, theta=theta, iterations=iterations,
        residual_history=np.asarray(residuals), converged=converged)


def _control_field(params, u, z, phi_k, psi_k, phi_i, psi_i):
    """Vectorized closed-form control for every agent and node."""
    bs = params.beta_s[:, None]
    bk = params.beta_k[:, None]
    bi = params.beta_i[:, None]
    u0, u1, u2 = u[:, :, 0], u[:, :, 1], u[:, :, 2]
    zk, zi = z[:, :, 0], z[:, :, 1]
    th = np.empty_like(u)
    th[:, :, 0] = 1.0 + bs * (zk * (u0 - u1) + zi * (u0 - u2))
    th[:, :, 1] = 1.0 + phi_k[None, :] + bk * zi * (u1 - u2)
    th[:, :, 2] = 1.0 + phi_i[None, :] + bi * zk * (u2 - u1)
    th[:, :, 3] = 1.0
    return np.clip(th, 0.0, params.a_bar)


def check_short_time(params: ModelParams, T: float):
    """Evaluate the contraction bound T * beta_bar * (((a_bar-1)^2 v 1)/2
    + phi_bar * a_bar); below 1 the fixed point is guaranteed to contract.
    Returns (holds, value)."""
    beta_bar = max(params.beta_s.max(), params.beta_k.max(),
                   params.beta_i.max())
    value = T * beta_bar * (0.5 * max((params.a_bar - 1.0) ** 2, 1.0)
                            + params.phi_bar * params.a_bar)
    return bool(value < 1.0), float(value)


def agent_cost(params, lambdas, control_path, z_path, grid, p0_row,
               agent: int = 0, method=RK4):
    """Expected running cost of one agent holding a given control path
    against frozen aggregates (used for unilateral-deviation checks).

    control_path: (n_nodes, 4) per-state controls; z_path: (n_nodes, 2).
    """
    from .model import running_cost, DUO, SINGLE

    n_nodes = grid.n_nodes
    control_path = np.asarray(control_path, dtype=float)
    z_path = np.asarray(z_path, dtype=float)
    phi_k, psi_k, phi_i, psi_i = _policy_arrays(lambdas, n_nodes)
    _, lam_i = split_lambdas(lambdas)
    mode = DUO if lam_i is not None else SINGLE

    class _OneAgentPop:
        n_agents = 1
        weight_matrix = np.zeros((1, 1))

    params_one = params if params.n_agents == 1 else params.take([agent])
    p = solve_kfp(_OneAgentPop(), params_one,
                  control_path[None], z_path[None], lambdas, grid,
                  np.asarray(p0_row, dtype=float)[None], method=method)[0]
    fvals = np.empty(n_nodes)
    for i in range(n_nodes):
        phis = (phi_k[i], phi_i[i]) if mode == DUO else (phi_k[i],)
        fvals[i] = sum(
            p[i, e] * running_cost(mode, e, control_path[i, e], phis)
            for e in range(N_STATES))
    return float(np.trapezoid(fvals, dx=grid.dt))

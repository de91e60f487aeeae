"""Principal-level optimization on top of the equilibrium map.

A principal pays a quadratic policy cost and is rewarded by the population
mass in her preferred state net of the mass in the rival state. The single
principal minimizes over a grid of constant policies; two principals play
a finite game on the induced cost bimatrix, solved by best-response
enumeration.
"""

from dataclasses import dataclass, field

import numpy as np

from .fbode import (TimeGrid, ggne_fixed_point, EquilibriumSolution,
                    DivergedError)
from .model import ModelParams, PolicyPath, StateE


class GridSearchFailure(RuntimeError):
    """Every policy cell failed to converge; no optimum can be reported."""


@dataclass(frozen=True)
class PolicyGrid:
    """Constant-policy candidates: the cross product of evenly spaced phi
    and psi values, both starting at 0."""

    phi_values: tuple
    psi_values: tuple

    @classmethod
    def linspace(cls, phi_bar: float, psi_bar: float,
                 n_phi: int = 6, n_psi: int = 6) -> "PolicyGrid":
        if n_phi < 1 or n_psi < 1:
            raise ValueError("grid needs at least one point per axis")
        phis = np.linspace(0.0, phi_bar, n_phi) if n_phi > 1 else np.array([0.0])
        psis = np.linspace(0.0, psi_bar, n_psi) if n_psi > 1 else np.array([0.0])
        return cls(phi_values=tuple(phis), psi_values=tuple(psis))

    def pairs(self):
        """(phi, psi) pairs, phi-major; the zero policy comes first."""
        return [(phi, psi) for phi in self.phi_values
                for psi in self.psi_values]

    @property
    def n_cells(self) -> int:
        return len(self.phi_values) * len(self.psi_values)


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Duo-principal cost bimatrix over policy-pair indices.

    j1[i, j] is principal K's cost when K plays pair i (of pairs_k) and I
    plays pair j (of pairs_i); j2 likewise for principal I. Cells where the
    equilibrium solve did not converge are masked invalid.
    """

    j1: np.ndarray
    j2: np.ndarray
    valid: np.ndarray
    pairs_k: list
    pairs_i: list
    iterations: np.ndarray = None


@dataclass(frozen=True, eq=False)
class StackelbergResult:
    mode: str                      # "single" or "duo"
    lambda_star: object            # PolicyPath, or list of (pair_K, pair_I)
    cost: object                   # float, or list of (J1, J2)
    table: list                    # per-cell dict rows for reporting
    solution: object               # EquilibriumSolution at the optimum
    failures: int = 0


def _mean_density(p_hat):
    if isinstance(p_hat, EquilibriumSolution):
        if not p_hat.converged:
            raise ValueError("principal cost needs a converged equilibrium")
        p_hat = p_hat.p
    p_hat = np.asarray(p_hat, dtype=float)
    if p_hat.ndim == 3:
        p_hat = p_hat.mean(axis=0)
    if p_hat.ndim != 2 or p_hat.shape[1] != 4:
        raise ValueError("density flow must be (n, nodes, 4) or (nodes, 4)")
    return p_hat


def principal_cost_single(lam: PolicyPath, p_hat, params: ModelParams,
                          grid: TimeGrid) -> float:
    """Trapezoid integral of c_lambda (phi^2 + psi^2) - pbar_K + pbar_I."""
    pbar = _mean_density(p_hat)
    lam = lam.resize(grid.n_nodes)
    integrand = (params.c_lambda * (lam.phi ** 2 + lam.psi ** 2)
                 - pbar[:, StateE.K] + pbar[:, StateE.I])
    return float(np.trapezoid(integrand, dx=grid.dt))


def principal_costs_duo(lam_k: PolicyPath, lam_i: PolicyPath, p_hat,
                        params: ModelParams, grid: TimeGrid,
                        c_lambdas=None):
    """Both principals' costs; principal I's density reward has the signs
    flipped. c_lambdas optionally sets per-principal cost scales."""
    pbar = _mean_density(p_hat)
    lam_k = lam_k.resize(grid.n_nodes)
    lam_i = lam_i.resize(grid.n_nodes)
    c_k, c_i = c_lambdas if c_lambdas is not None else (params.c_lambda,
                                                        params.c_lambda)
    density = pbar[:, StateE.K] - pbar[:, StateE.I]
    j1 = np.trapezoid(c_k * (lam_k.phi ** 2 + lam_k.psi ** 2) - density,
                      dx=grid.dt)
    j2 = np.trapezoid(c_i * (lam_i.phi ** 2 + lam_i.psi ** 2) + density,
                      dx=grid.dt)
    return float(j1), float(j2)


def solve_sgge(pop, params, grid, policy_grid, p0, tol=1e-6, max_iter=500,
               damping=1.0, method="rk4", progress=None) -> StackelbergResult:
    """Grid search for the single principal's optimal constant policy.

    Runs one equilibrium solve per grid cell, scores converged cells, and
    returns the minimizer (ties: first in phi-major order, i.e. smallest
    (phi, psi) lexicographically). Non-converged cells are reported but
    excluded; if every cell fails, GridSearchFailure is raised.
    """
    params = params.expand(pop.n_agents)
    table = []
    best = None
    failures = 0
    for phi, psi in policy_grid.pairs():
        lam = PolicyPath.constant_policy(phi, psi, grid.n_nodes)
        try:
            sol = ggne_fixed_point(pop, params, lam, grid, p0, tol=tol,
                                   max_iter=max_iter, damping=damping,
                                   method=method)
        except DivergedError:
            sol = None
        row = {"phi_k": phi, "psi_k": psi,
               "converged": sol is not None and sol.converged,
               "iterations": sol.iterations if sol is not None else 0,
               "j1": np.nan}
        if sol is not None and sol.converged:
            cost = principal_cost_single(lam, sol, params, grid)
            row["j1"] = cost
            if best is None or cost < best[0]:
                best = (cost, lam, sol)
        else:
            failures += 1
        table.append(row)
        if progress is not None:
            progress(row)
    if best is None:
        raise GridSearchFailure(
            "no policy cell produced a converged equilibrium")
    cost, lam, sol = best
    return StackelbergResult(mode="single", lambda_star=lam, cost=cost,
                             table=table, solution=sol, failures=failures)


def build_cost_matrix(pop, params, grid, policy_grid_k, policy_grid_i, p0,
                      tol=1e-6, max_iter=500, damping=1.0, method="rk4",
                      c_lambdas=None, progress=None) -> CostMatrix:
    """Duo equilibrium solve per policy-pair cell; failures mask the cell."""
    params = params.expand(pop.n_agents)
    pairs_k = policy_grid_k.pairs()
    pairs_i = policy_grid_i.pairs()
    nk, ni = len(pairs_k), len(pairs_i)
    j1 = np.full((nk, ni), np.nan)
    j2 = np.full((nk, ni), np.nan)
    valid = np.zeros((nk, ni), dtype=bool)
    iters = np.zeros((nk, ni), dtype=int)
    for a, (phi_k, psi_k) in enumerate(pairs_k):
        lam_k = PolicyPath.constant_policy(phi_k, psi_k, grid.n_nodes)
        for b, (phi_i, psi_i) in enumerate(pairs_i):
            lam_i = PolicyPath.constant_policy(phi_i, psi_i, grid.n_nodes)
            try:
                sol = ggne_fixed_point(pop, params, (lam_k, lam_i), grid,
                                       p0, tol=tol, max_iter=max_iter,
                                       damping=damping, method=method)
            except DivergedError:
                sol = None
            if sol is not None:
                iters[a, b] = sol.iterations
                if sol.converged:
                    j1[a, b], j2[a, b] = principal_costs_duo(
                        lam_k, lam_i, sol, params, grid,
                        c_lambdas=c_lambdas)
                    valid[a, b] = True
            if progress is not None:
                progress(a, b, bool(valid[a, b]))
    return CostMatrix(j1=j1, j2=j2, valid=valid, pairs_k=pairs_k,
                      pairs_i=pairs_i, iterations=iters)


def solve_dsge(m: CostMatrix):
    """All pure Nash cells of the cost bimatrix.

    Cell (i, j) qualifies when J1[i, j] is minimal in its column and
    J2[i, j] minimal in its row, both restricted to valid cells (weak
    inequalities, so ties yield multiple equilibria). Returns 0-indexed
    (i, j, J1, J2) tuples; an empty list means no pure Nash on the grid.
    """
    nk, ni = m.j1.shape
    out = []
    for i in range(nk):
        for j in range(ni):
            if not m.valid[i, j]:
                continue
            col = m.j1[:, j][m.valid[:, j]]
            row = m.j2[i, :][m.valid[i, :]]
            if m.j1[i, j] <= col.min() and m.j2[i, j] <= row.min():
                out.append((i, j, float(m.j1[i, j]), float(m.j2[i, j])))
    return out

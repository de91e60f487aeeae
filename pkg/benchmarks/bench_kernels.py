#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the three hot paths (density sweep, value sweep, event-driven Monte
Carlo) plus the full equilibrium fixed point, once per backend, and prints
a speedup table. The numba column is skipped when numba is unavailable.

Usage:
    python benchmarks/bench_kernels.py [--agents 50] [--steps 400]
                                       [--players 2000] [--paths 20]
                                       [--repeat 5]
"""
import argparse
import time

import numpy as np

from skirgg import (GraphonSpec, ModelParams, PolicyPath, SimConfig,
                    TimeGrid, ggne_fixed_point, sample_population, simulate)
from skirgg import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def build_problem(n_agents, n_steps):
    pop = sample_population(GraphonSpec.power_law(1.0, -0.6),
                            n_agents, seed=42)
    params = ModelParams(beta_s=0.4, beta_k=0.5, beta_i=0.75,
                         mu_k=0.1, mu_i=0.1, eta=0.05)
    grid = TimeGrid(T=10.0, n_steps=n_steps)
    lam = PolicyPath.constant_policy(0.3, 0.2, grid.n_nodes)
    p0 = np.array([0.95, 0.02, 0.03, 0.0])
    sol = ggne_fixed_point(pop, params, lam, grid, p0)
    assert sol.converged
    return pop, params, grid, lam, p0, sol


def bench_sweeps(pop, params, grid, sol, repeat, impl):
    nodes = grid.n_nodes
    phi_k = np.full(nodes, 0.3)
    psi_k = np.full(nodes, 0.2)
    zeros = np.zeros(nodes)
    p0_rows = np.ascontiguousarray(sol.p[:, 0])
    z = np.ascontiguousarray(sol.z)
    theta = np.ascontiguousarray(sol.theta)

    t_kfp = best_of(lambda: kernels.kfp_sweep(
        p0_rows, theta, z, psi_k, zeros,
        params.beta_s, params.beta_k, params.beta_i,
        params.mu_k, params.mu_i, params.eta,
        grid.dt, True, impl=impl), repeat)
    t_hjb = best_of(lambda: kernels.hjb_sweep(
        z, phi_k, psi_k, zeros, zeros,
        params.beta_s, params.beta_k, params.beta_i,
        params.mu_k, params.mu_i, params.eta,
        grid.dt, True, params.a_bar, impl=impl), repeat)
    return t_kfp, t_hjb


def bench_fixed_point(pop, params, grid, lam, p0, repeat, impl):
    saved = kernels.DEFAULT_IMPL
    kernels.DEFAULT_IMPL = impl
    try:
        return best_of(lambda: ggne_fixed_point(pop, params, lam, grid, p0),
                       repeat)
    finally:
        kernels.DEFAULT_IMPL = saved


def bench_mc(pop, params, grid, lam, p0, sol, players, paths, repeat, impl):
    reps = players // pop.n_agents
    cfg = SimConfig(n_players=reps * pop.n_agents, n_paths=paths, seed=7,
                    control_source="equilibrium_field")
    type_of = np.repeat(np.arange(pop.n_agents), reps)
    saved = kernels.DEFAULT_IMPL
    kernels.DEFAULT_IMPL = impl
    try:
        return best_of(lambda: simulate(pop, params, lam, sol.theta, grid,
                                        cfg, p0, type_of=type_of), repeat)
    finally:
        kernels.DEFAULT_IMPL = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=50)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--players", type=int, default=2000)
    ap.add_argument("--paths", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    impls = list(kernels.IMPLEMENTATIONS)
    print(f"backends: {', '.join(impls)}   "
          f"(agents={args.agents}, steps={args.steps}, "
          f"players={args.players}, paths={args.paths}, "
          f"best of {args.repeat})")

    pop, params, grid, lam, p0, sol = build_problem(args.agents, args.steps)

    rows = {}
    for impl in impls:
        # throwaway call so jit compilation is not timed
        bench_sweeps(pop, params, grid, sol, 1, impl)
        t_kfp, t_hjb = bench_sweeps(pop, params, grid, sol,
                                    args.repeat, impl)
        t_fp = bench_fixed_point(pop, params, grid, lam, p0,
                                 args.repeat, impl)
        t_mc = bench_mc(pop, params, grid, lam, p0, sol,
                        args.players, args.paths, max(1, args.repeat // 2),
                        impl)
        rows[impl] = {"density sweep": t_kfp, "value sweep": t_hjb,
                      "fixed point": t_fp, "monte carlo": t_mc}

    width = 16
    header = f"{'kernel':<{width}}" + "".join(
        f"{impl + ' (s)':>{width}}" for impl in impls)
    if len(impls) == 2:
        header += f"{'speedup':>{width}}"
    print(header)
    print("-" * len(header))
    for name in rows[impls[0]]:
        line = f"{name:<{width}}"
        for impl in impls:
            line += f"{rows[impl][name]:>{width}.4f}"
        if len(impls) == 2:
            ratio = rows[impls[0]][name] / rows[impls[1]][name]
            line += f"{ratio:>{width}.1f}x"
        print(line)


if __name__ == "__main__":
    main()

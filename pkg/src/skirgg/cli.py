"""Config-driven experiment runner.

Usage: skirgg run <config.toml> [--out DIR] [--seed N]
                                [--mode ggne|sgge|dsge] [--validate-mc]

Modes: a single equilibrium solve at a fixed policy (ggne), the single
principal's grid search with a no-regulation comparison run (sgge), or the
duo-principal cost matrix and pure Nash cells (dsge). Results land in the
output directory as long-format CSVs plus a report.json that echoes the
fully resolved config.

Exit codes: 0 success, 2 invalid config, 3 solver non-convergence.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import reporting
from .config import ConfigError, ExperimentConfig, load_config
from .fbode import (DivergedError, StabilityError, check_short_time,
                    ggne_fixed_point)
from .finite_player import RateCapError, SimConfig, simulate
from .model import PolicyPath
from .principal import (GridSearchFailure, PolicyGrid, build_cost_matrix,
                        principal_cost_single, solve_dsge, solve_sgge)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3


@dataclass
class RunReport:
    config: dict
    mode: str
    short_time: dict
    results: dict
    timings: dict
    manifest: list = field(default_factory=list)
    exit_status: int = EXIT_OK

    def to_dict(self):
        return _plain({
            "config": self.config, "mode": self.mode,
            "short_time": self.short_time, "results": self.results,
            "timings": self.timings, "manifest": self.manifest,
            "exit_status": self.exit_status})


def _plain(obj):
    """Recursively convert numpy scalars/arrays for JSON emission."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _emit_solution(out_dir, suffix, sol, times, group_of, manifest):
    names = {
        "density": f"density{suffix}.csv",
        "values": f"values{suffix}.csv",
        "aggregates": f"aggregates{suffix}.csv",
        "controls": f"controls{suffix}.csv",
    }
    reporting.write_density_csv(os.path.join(out_dir, names["density"]),
                                times, sol.p, group_of)
    reporting.write_values_csv(os.path.join(out_dir, names["values"]),
                               times, sol.u)
    reporting.write_aggregates_csv(
        os.path.join(out_dir, names["aggregates"]), times, sol.z)
    reporting.write_controls_csv(os.path.join(out_dir, names["controls"]),
                                 times, sol.theta)
    manifest.extend(names.values())
    return names


def _solution_stats(sol):
    return {
        "converged": sol.converged,
        "iterations": sol.iterations,
        "final_residual": (float(sol.residual_history[-1])
                           if len(sol.residual_history) else None),
    }


def _type_counts(n_agents, n_players):
    base, extra = divmod(n_players, n_agents)
    counts = np.full(n_agents, base, dtype=np.int64)
    counts[:extra] += 1
    return counts


def run(config: ExperimentConfig, validate_mc: bool = False) -> RunReport:
    """Execute the configured experiment and write all outputs."""
    timings = {}
    t_start = time.perf_counter()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)

    pop = config.build_population()
    params = config.build_params(pop)
    p0 = config.initial
    grid = config.grid
    times = grid.nodes()
    solver = dict(tol=config.solver["tol"],
                  max_iter=config.solver["max_iter"],
                  damping=config.solver["damping"],
                  method=config.solver["integrator"])
    holds, value = check_short_time(params, grid.T)
    timings["setup_s"] = time.perf_counter() - t_start

    manifest = []
    results = {}
    exit_status = EXIT_OK
    mc_reference = None   # (lambdas, solution) used by --validate-mc
    t_solve = time.perf_counter()

    if config.mode == "ggne_only":
        lam = PolicyPath.constant_policy(config.policy["phi"],
                                         config.policy["psi"], grid.n_nodes)
        sol = ggne_fixed_point(pop, params, lam, grid, p0, **solver)
        _emit_solution(out_dir, "", sol, times, pop.group_of, manifest)
        results["equilibrium"] = _solution_stats(sol)
        results["policy"] = {"phi": config.policy["phi"],
                             "psi": config.policy["psi"]}
        if sol.converged:
            results["j0"] = principal_cost_single(lam, sol, params, grid)
        else:
            exit_status = EXIT_NONCONVERGED
        mc_reference = (lam, sol)
        print(f"ggne: converged={sol.converged} "
              f"iterations={sol.iterations}")

    elif config.mode == "sgge":
        policy_grid = PolicyGrid.linspace(
            params.phi_bar, params.psi_bar,
            config.policy["n_phi"], config.policy["n_psi"])

        def show(row):
            print(f"  cell phi={row['phi_k']:.3f} psi={row['psi_k']:.3f} "
                  f"J0={row['j1']:.6g} converged={row['converged']} "
                  f"({row['iterations']} it)")

        result = solve_sgge(pop, params, grid, policy_grid, p0,
                            progress=show, **solver)
        lam_star = result.lambda_star
        baseline = ggne_fixed_point(pop, params,
                                    PolicyPath.zero(grid.n_nodes), grid,
                                    p0, **solver)
        j_zero = (principal_cost_single(PolicyPath.zero(grid.n_nodes),
                                        baseline, params, grid)
                  if baseline.converged else None)
        reporting.write_principal_table_csv(
            os.path.join(out_dir, "principal_table.csv"), result.table)
        manifest.append("principal_table.csv")
        _emit_solution(out_dir, "", result.solution, times, pop.group_of,
                       manifest)
        if baseline.converged:
            _emit_solution(out_dir, "_baseline", baseline, times,
                           pop.group_of, manifest)
        results["lambda_star"] = {"phi": float(lam_star.phi[0]),
                                  "psi": float(lam_star.psi[0])}
        results["j0_star"] = result.cost
        results["j0_zero"] = j_zero
        results["grid_cells"] = len(result.table)
        results["failed_cells"] = result.failures
        results["optimum"] = _solution_stats(result.solution)
        results["baseline"] = _solution_stats(baseline)
        if result.failures > 0 or not baseline.converged:
            exit_status = EXIT_NONCONVERGED
        mc_reference = (lam_star, result.solution)
        print(f"sgge: lambda*=(phi={lam_star.phi[0]:.3f}, "
              f"psi={lam_star.psi[0]:.3f}) J0*={result.cost:.6g} "
              f"J0(0)={j_zero}")

    else:  # dsge
        policy_grid = PolicyGrid.linspace(
            params.phi_bar, params.psi_bar,
            config.policy["n_phi"], config.policy["n_psi"])

        def show(a, b, ok):
            print(f"  cell ({a}, {b}) converged={ok}")

        matrix = build_cost_matrix(pop, params, grid, policy_grid,
                                   policy_grid, p0,
                                   c_lambdas=config.c_lambdas(),
                                   progress=show, **solver)
        cells = solve_dsge(matrix)
        rows = []
        for a, (phi_k, psi_k) in enumerate(matrix.pairs_k):
            for b, (phi_i, psi_i) in enumerate(matrix.pairs_i):
                rows.append({
                    "phi_k": phi_k, "psi_k": psi_k,
                    "phi_i": phi_i, "psi_i": psi_i,
                    "j1": matrix.j1[a, b], "j2": matrix.j2[a, b],
                    "converged": bool(matrix.valid[a, b]),
                    "iterations": int(matrix.iterations[a, b])})
        reporting.write_principal_table_csv(
            os.path.join(out_dir, "cost_matrix.csv"), rows, duo=True)
        reporting.write_nash_cells_csv(
            os.path.join(out_dir, "nash_cells.csv"), cells,
            matrix.pairs_k, matrix.pairs_i)
        manifest.extend(["cost_matrix.csv", "nash_cells.csv"])

        zero_pair = (PolicyPath.zero(grid.n_nodes),
                     PolicyPath.zero(grid.n_nodes))
        baseline = ggne_fixed_point(pop, params, zero_pair, grid, p0,
                                    **solver)
        if baseline.converged:
            _emit_solution(out_dir, "_baseline", baseline, times,
                           pop.group_of, manifest)
        nash_summary = []
        for i, j, j1, j2 in cells:
            nash_summary.append({"i": i, "j": j,
                                 "lambda_k": list(matrix.pairs_k[i]),
                                 "lambda_i": list(matrix.pairs_i[j]),
                                 "j1": j1, "j2": j2})
        results["nash_cells"] = nash_summary
        results["valid_cells"] = int(matrix.valid.sum())
        results["total_cells"] = int(matrix.valid.size)
        results["baseline"] = _solution_stats(baseline)
        if cells:
            i, j, _, _ = cells[0]
            lam_k = PolicyPath.constant_policy(*matrix.pairs_k[i],
                                               grid.n_nodes)
            lam_i = PolicyPath.constant_policy(*matrix.pairs_i[j],
                                               grid.n_nodes)
            nash_sol = ggne_fixed_point(pop, params, (lam_k, lam_i), grid,
                                        p0, **solver)
            if nash_sol.converged:
                _emit_solution(out_dir, "_nash", nash_sol, times,
                               pop.group_of, manifest)
            results["nash_solution"] = _solution_stats(nash_sol)
            mc_reference = ((lam_k, lam_i), nash_sol)
        else:
            mc_reference = (zero_pair, baseline)
        if not baseline.converged or matrix.valid.sum() < matrix.valid.size:
            exit_status = EXIT_NONCONVERGED
        print(f"dsge: {len(cells)} Nash cell(s) on a "
              f"{matrix.valid.shape[0]}x{matrix.valid.shape[1]} grid")

    timings["solve_s"] = time.perf_counter() - t_solve

    if validate_mc:
        t_mc = time.perf_counter()
        mc_cfg = config.mc or {"n_players": 2000, "n_paths": 20,
                               "seed": 1234, "rate_cap": None}
        lambdas, sol = mc_reference
        counts = _type_counts(pop.n_agents, mc_cfg["n_players"])
        type_of = np.repeat(np.arange(pop.n_agents), counts)
        sim_config = SimConfig(n_players=mc_cfg["n_players"],
                               n_paths=mc_cfg["n_paths"],
                               seed=mc_cfg["seed"],
                               rate_cap=mc_cfg["rate_cap"])
        flow = simulate(pop, params, lambdas, sol.theta, grid, sim_config,
                        p0, type_of=type_of)
        weights = counts / counts.sum()
        pbar = np.einsum("x,xke->ke", weights, sol.p)
        gap = float(np.abs(flow.fractions - pbar).max())
        reporting.write_mc_density_csv(
            os.path.join(out_dir, "density_mc.csv"), times, flow.fractions)
        manifest.append("density_mc.csv")
        results["mc"] = {"n_players": mc_cfg["n_players"],
                         "n_paths": mc_cfg["n_paths"],
                         "seed": mc_cfg["seed"],
                         "rate_cap": flow.rate_cap,
                         "sup_gap": gap}
        timings["mc_s"] = time.perf_counter() - t_mc
        print(f"mc validation: sup gap {gap:.4f} at "
              f"{mc_cfg['n_players']} players, {mc_cfg['n_paths']} paths")

    timings["total_s"] = time.perf_counter() - t_start
    report = RunReport(config=config.echo, mode=config.mode,
                       short_time={"holds": holds, "value": value},
                       results=results, timings=timings,
                       exit_status=exit_status)
    report.manifest = reporting.file_manifest(out_dir, manifest)
    reporting.write_report_json(os.path.join(out_dir, "report.json"),
                                report.to_dict())
    return report


def _apply_overrides(config, args):
    if args.out is not None:
        object.__setattr__(config, "out_dir", args.out)
        config.echo["run"]["out_dir"] = args.out
    if args.seed is not None:
        object.__setattr__(config, "seed", args.seed)
        config.echo["population"]["seed"] = args.seed
    if args.mode is not None:
        mode = {"ggne": "ggne_only"}.get(args.mode, args.mode)
        object.__setattr__(config, "mode", mode)
        config.echo["run"]["mode"] = mode
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="skirgg",
        description="Stackelberg graphon games of rumor spreading: "
                    "equilibrium solver and experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a TOML config")
    runp.add_argument("config", help="path to the experiment config")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--seed", type=int, default=None,
                      help="override the population sampling seed")
    runp.add_argument("--mode", choices=["ggne", "sgge", "dsge"],
                      default=None, help="override the run mode")
    runp.add_argument("--validate-mc", action="store_true",
                      help="append a finite-player Monte Carlo validation")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
    except FileNotFoundError:
        print(f"config error: no such file: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    config = _apply_overrides(config, args)

    try:
        report = run(config, validate_mc=args.validate_mc)
    except (StabilityError, DivergedError, GridSearchFailure,
            RateCapError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    if report.exit_status != EXIT_OK:
        print("warning: at least one requested solve did not converge",
              file=sys.stderr)
    print(f"report: {os.path.join(config.out_dir, 'report.json')}")
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())

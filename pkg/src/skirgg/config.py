"""Experiment configuration: TOML loading, validation, and assembly.

Configs are strict: unknown sections or keys and type mismatches raise
ConfigError naming the offending field path, so typos fail fast instead of
silently falling back to defaults. Every default is resolved at load time
and echoed into the run report.
"""

from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .fbode import TimeGrid
from .graphon import GraphonSpec, sample_population
from .model import ModelParams

RATE_NAMES = ("beta_s", "beta_k", "beta_i", "mu_k", "mu_i", "eta")

MODES = ("ggne_only", "sgge", "dsge")
INTEGRATORS = ("rk4", "euler")
SAMPLING_MODES = ("uniform_iid", "group_proportional")


class ConfigError(ValueError):
    """Invalid configuration; the message names the field path."""


def _want(value, kinds, path):
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigError(f"{path}: expected a number, got a boolean")
    if not isinstance(value, kinds):
        names = "/".join(k.__name__ for k in kinds
                         if k is not bool)
        raise ConfigError(f"{path}: expected {names}, "
                          f"got {type(value).__name__}")
    return value


def _number(table, key, default, section, low=None, high=None,
            low_open=False):
    path = f"{section}.{key}"
    value = table.pop(key, default)
    if value is None:
        return None
    value = float(_want(value, (int, float), path))
    if low is not None and (value <= low if low_open else value < low):
        op = ">" if low_open else ">="
        raise ConfigError(f"{path}: must be {op} {low}")
    if high is not None and value > high:
        raise ConfigError(f"{path}: must be <= {high}")
    return value


def _integer(table, key, default, section, low=None):
    path = f"{section}.{key}"
    value = _want(table.pop(key, default), (int,), path)
    if low is not None and value < low:
        raise ConfigError(f"{path}: must be >= {low}")
    return value


def _choice(table, key, default, section, options):
    path = f"{section}.{key}"
    value = _want(table.pop(key, default), (str,), path)
    if value not in options:
        raise ConfigError(f"{path}: must be one of {', '.join(options)}")
    return value


def _no_leftovers(table, section):
    if table:
        keys = ", ".join(f"{section}.{k}" for k in sorted(table))
        raise ConfigError(f"unknown keys: {keys}")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Fully resolved experiment description (defaults included)."""

    graphon: GraphonSpec
    rate_table: dict              # per-group lists, one value per group
    bounds: dict                  # a_bar, phi_bar, psi_bar, c_lambda(,_k,_i)
    grid: TimeGrid
    initial: np.ndarray           # (4,) shared initial distribution
    n_agents: int
    seed: int
    sampling_mode: str
    mode: str
    out_dir: str
    solver: dict                  # tol, max_iter, damping, integrator
    policy: dict                  # phi, psi, phi_i, psi_i, n_phi, n_psi
    mc: dict                      # or None when the section is absent
    echo: dict                    # resolved key/value view for the report

    def build_population(self):
        return sample_population(self.graphon, self.n_agents, self.seed,
                                 mode=self.sampling_mode)

    def build_params(self, pop) -> ModelParams:
        table = {name: np.asarray(vals, dtype=float)[pop.group_of]
                 for name, vals in self.rate_table.items()}
        return ModelParams(
            **table, a_bar=self.bounds["a_bar"],
            phi_bar=self.bounds["phi_bar"], psi_bar=self.bounds["psi_bar"],
            c_lambda=self.bounds["c_lambda"])

    def c_lambdas(self):
        c_k = self.bounds.get("c_lambda_k") or self.bounds["c_lambda"]
        c_i = self.bounds.get("c_lambda_i") or self.bounds["c_lambda"]
        return (c_k, c_i)


def _parse_graphon(section) -> GraphonSpec:
    kind = _choice(section, "kind", None, "graphon",
                   ("power_law", "piecewise_constant", "constant"))
    try:
        if kind == "power_law":
            c = _number(section, "c", 1.0, "graphon", low=0.0, low_open=True)
            exponent = _number(section, "exponent", -1.0, "graphon")
            spec = GraphonSpec.power_law(c=c, exponent=exponent)
        elif kind == "constant":
            w0 = _number(section, "w0", None, "graphon", low=0.0, high=1.0)
            if w0 is None:
                raise ConfigError("graphon.w0: required for constant kind")
            spec = GraphonSpec.constant(w0)
        else:
            lengths = section.pop("block_lengths", None)
            matrix = section.pop("block_matrix", None)
            if lengths is None or matrix is None:
                raise ConfigError("graphon.block_lengths and "
                                  "graphon.block_matrix are required for "
                                  "piecewise_constant kind")
            spec = GraphonSpec.piecewise_constant(lengths, matrix)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"graphon: {exc}") from exc
    _no_leftovers(section, "graphon")
    return spec


def _parse_rates(section, n_groups):
    table = {}
    for name in RATE_NAMES:
        if name not in section:
            raise ConfigError(f"params.{name}: required")
        value = section.pop(name)
        path = f"params.{name}"
        if isinstance(value, list):
            if len(value) != n_groups:
                raise ConfigError(
                    f"{path}: {len(value)} values for {n_groups} "
                    "graphon group(s)")
            vals = [float(_want(v, (int, float), path)) for v in value]
        else:
            vals = [float(_want(value, (int, float), path))] * n_groups
        if any(v < 0 for v in vals):
            raise ConfigError(f"{path}: must be nonnegative")
        table[name] = vals
    return table


def load_config(path) -> ExperimentConfig:
    """Parse and validate a TOML experiment file."""
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"not valid TOML: {exc}") from exc

    known = {"graphon", "params", "grid", "population", "initial", "run",
             "solver", "policy", "mc"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")
    if "graphon" not in raw:
        raise ConfigError("graphon: section is required")
    if "params" not in raw:
        raise ConfigError("params: section is required")

    graphon = _parse_graphon(dict(raw["graphon"]))

    par = dict(raw["params"])
    rate_table = _parse_rates(par, graphon.n_groups())
    bounds = {
        "a_bar": _number(par, "a_bar", 5.0, "params", low=0.0,
                         low_open=True),
        "phi_bar": _number(par, "phi_bar", 0.5, "params", low=0.0),
        "psi_bar": _number(par, "psi_bar", 0.5, "params", low=0.0),
        "c_lambda": _number(par, "c_lambda", 1.0, "params", low=0.0,
                            low_open=True),
        "c_lambda_k": _number(par, "c_lambda_k", None, "params", low=0.0,
                              low_open=True),
        "c_lambda_i": _number(par, "c_lambda_i", None, "params", low=0.0,
                              low_open=True),
    }
    _no_leftovers(par, "params")

    gr = dict(raw.get("grid", {}))
    horizon = _number(gr, "horizon", 10.0, "grid", low=0.0, low_open=True)
    n_steps = _integer(gr, "n_steps", 200, "grid", low=2)
    _no_leftovers(gr, "grid")
    grid = TimeGrid(T=horizon, n_steps=n_steps)

    pop_sec = dict(raw.get("population", {}))
    n_agents = _integer(pop_sec, "n_agents", 50, "population", low=1)
    seed = _integer(pop_sec, "seed", 7, "population")
    sampling_mode = _choice(pop_sec, "mode", "uniform_iid", "population",
                            SAMPLING_MODES)
    _no_leftovers(pop_sec, "population")
    if sampling_mode == "group_proportional" and graphon.kind != \
            "piecewise_constant":
        raise ConfigError("population.mode: group_proportional requires a "
                          "piecewise_constant graphon")

    init_sec = dict(raw.get("initial", {}))
    dist = init_sec.pop("distribution", [0.95, 0.02, 0.03, 0.0])
    _no_leftovers(init_sec, "initial")
    dist = np.asarray(
        [float(_want(v, (int, float), "initial.distribution"))
         for v in _want(dist, (list,), "initial.distribution")])
    if dist.shape != (4,):
        raise ConfigError("initial.distribution: needs exactly 4 entries")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-12:
        raise ConfigError("initial.distribution: must be a probability "
                          "vector summing to 1")

    run_sec = dict(raw.get("run", {}))
    mode = _choice(run_sec, "mode", "ggne_only", "run", MODES)
    out_dir = _want(run_sec.pop("out_dir", "out"), (str,), "run.out_dir")
    _no_leftovers(run_sec, "run")

    sol = dict(raw.get("solver", {}))
    solver = {
        "tol": _number(sol, "tol", 1e-6, "solver", low=0.0, low_open=True),
        "max_iter": _integer(sol, "max_iter", 500, "solver", low=1),
        "damping": _number(sol, "damping", 1.0, "solver", low=0.0,
                           low_open=True, high=1.0),
        "integrator": _choice(sol, "integrator", "rk4", "solver",
                              INTEGRATORS),
    }
    _no_leftovers(sol, "solver")

    pol = dict(raw.get("policy", {}))
    policy = {
        "phi": _number(pol, "phi", 0.0, "policy", low=0.0),
        "psi": _number(pol, "psi", 0.0, "policy", low=0.0),
        "phi_i": _number(pol, "phi_i", 0.0, "policy", low=0.0),
        "psi_i": _number(pol, "psi_i", 0.0, "policy", low=0.0),
        "n_phi": _integer(pol, "n_phi", 6, "policy", low=1),
        "n_psi": _integer(pol, "n_psi", 6, "policy", low=1),
    }
    _no_leftovers(pol, "policy")
    for key in ("phi", "phi_i"):
        if policy[key] > bounds["phi_bar"]:
            raise ConfigError(f"policy.{key}: exceeds params.phi_bar")
    for key in ("psi", "psi_i"):
        if policy[key] > bounds["psi_bar"]:
            raise ConfigError(f"policy.{key}: exceeds params.psi_bar")

    mc = None
    if "mc" in raw:
        mc_sec = dict(raw["mc"])
        mc = {
            "n_players": _integer(mc_sec, "n_players", 2000, "mc", low=1),
            "n_paths": _integer(mc_sec, "n_paths", 20, "mc", low=1),
            "seed": _integer(mc_sec, "seed", 1234, "mc"),
            "rate_cap": _number(mc_sec, "rate_cap", None, "mc", low=0.0,
                                low_open=True),
        }
        _no_leftovers(mc_sec, "mc")

    echo = {
        "graphon": {"kind": graphon.kind, "c": graphon.c,
                    "exponent": graphon.exponent,
                    "block_lengths": list(graphon.block_lengths),
                    "block_matrix": [list(r) for r in graphon.block_matrix],
                    "w0": graphon.w0},
        "params": {**{k: list(v) for k, v in rate_table.items()}, **bounds},
        "grid": {"horizon": horizon, "n_steps": n_steps},
        "population": {"n_agents": n_agents, "seed": seed,
                       "mode": sampling_mode},
        "initial": {"distribution": dist.tolist()},
        "run": {"mode": mode, "out_dir": out_dir},
        "solver": dict(solver),
        "policy": dict(policy),
        "mc": dict(mc) if mc else None,
    }
    return ExperimentConfig(
        graphon=graphon, rate_table=rate_table, bounds=bounds, grid=grid,
        initial=dist, n_agents=n_agents, seed=seed,
        sampling_mode=sampling_mode, mode=mode, out_dir=out_dir,
        solver=solver, policy=policy, mc=mc, echo=echo)

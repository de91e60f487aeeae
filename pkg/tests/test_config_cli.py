import csv
import json
import os

import numpy as np
import pytest

from skirgg.cli import main
from skirgg.config import ConfigError, load_config

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")

TINY = """
[graphon]
kind = "constant"
w0 = 0.5

[params]
beta_s = 0.3
beta_k = 0.3
beta_i = 0.3
mu_k = 0.1
mu_i = 0.1
eta = 0.05

[grid]
horizon = 2.0
n_steps = 40

[population]
n_agents = 4
seed = 3

[initial]
distribution = [0.9, 0.05, 0.05, 0.0]

[run]
mode = "ggne_only"
out_dir = "{out}"
"""


def write_tiny(tmp_path, **extra):
    out = tmp_path / "out"
    text = TINY.format(out=str(out).replace("\\", "/"))
    for section, body in extra.items():
        text += f"\n[{section}]\n{body}\n"
    path = tmp_path / "exp.cfg"
    path.write_text(text)
    return str(path), str(out)


# ---------------------------------------------------------------- parsing

def test_bundled_configs_parse():
    age = load_config(os.path.join(CONFIG_DIR, "age_groups.cfg"))
    assert age.mode == "sgge"
    assert age.n_agents == 50
    assert age.graphon.n_groups() == 4
    assert age.grid.n_steps == 200
    assert age.mc is not None and age.mc["n_players"] == 2000

    power = load_config(os.path.join(CONFIG_DIR, "power_law.cfg"))
    assert power.graphon.kind == "power_law"
    assert power.sampling_mode == "uniform_iid"

    duo = load_config(os.path.join(CONFIG_DIR, "duo.cfg"))
    assert duo.mode == "dsge"


def test_bundled_config_builds_population():
    cfg = load_config(os.path.join(CONFIG_DIR, "age_groups.cfg"))
    pop = cfg.build_population()
    assert pop.n_agents == 50
    params = cfg.build_params(pop)
    assert params.n_agents == 50
    # youngest group carries the highest contagion rates
    young = pop.group_of == 0
    assert np.all(params.beta_i[young] == 0.75)


def test_unknown_section_rejected(tmp_path):
    path, _ = write_tiny(tmp_path, simulation="x = 1")
    with pytest.raises(ConfigError, match="simulation"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path, _ = write_tiny(tmp_path)
    text = open(path).read().replace("n_steps = 40",
                                     "n_steps = 40\nstepsize = 0.1")
    open(path, "w").write(text)
    with pytest.raises(ConfigError, match="grid.stepsize"):
        load_config(path)


def test_wrong_type_names_path(tmp_path):
    path, _ = write_tiny(tmp_path)
    text = open(path).read().replace('horizon = 2.0', 'horizon = "long"')
    open(path, "w").write(text)
    with pytest.raises(ConfigError, match="grid.horizon"):
        load_config(path)


def test_bad_initial_distribution(tmp_path):
    path, _ = write_tiny(tmp_path)
    text = open(path).read().replace("[0.9, 0.05, 0.05, 0.0]",
                                     "[0.9, 0.2, 0.05, 0.0]")
    open(path, "w").write(text)
    with pytest.raises(ConfigError, match="initial.distribution"):
        load_config(path)


def test_rate_list_length_must_match_groups(tmp_path):
    path, _ = write_tiny(tmp_path)
    text = open(path).read().replace("beta_s = 0.3",
                                     "beta_s = [0.3, 0.4]")
    open(path, "w").write(text)
    with pytest.raises(ConfigError, match="beta_s"):
        load_config(path)


def test_policy_beyond_bound_rejected(tmp_path):
    path, _ = write_tiny(tmp_path, policy="phi = 0.9")
    with pytest.raises(ConfigError, match="phi"):
        load_config(path)


def test_not_toml(tmp_path):
    path = tmp_path / "broken.cfg"
    path.write_text("[graphon\nkind =")
    with pytest.raises(ConfigError, match="TOML"):
        load_config(str(path))


# ---------------------------------------------------------------- cli runs

def test_cli_missing_file_exits_2(capsys):
    assert main(["run", "/nonexistent/exp.cfg"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_bad_config_exits_2(tmp_path, capsys):
    path, _ = write_tiny(tmp_path, typo="x = 1")
    assert main(["run", path]) == 2
    assert "typo" in capsys.readouterr().err


def test_cli_ggne_run_outputs(tmp_path):
    path, out = write_tiny(tmp_path)
    assert main(["run", path]) == 0

    report = json.load(open(os.path.join(out, "report.json")))
    assert report["mode"] == "ggne_only"
    assert report["results"]["equilibrium"]["converged"]
    assert report["short_time"]["holds"] in (True, False)
    # every manifest entry exists with the recorded size
    for entry in report["manifest"]:
        full = os.path.join(out, entry["file"])
        assert os.path.getsize(full) == entry["bytes"]
    names = {entry["file"] for entry in report["manifest"]}
    assert {"density.csv", "values.csv", "aggregates.csv",
            "controls.csv"} <= names


def test_cli_density_csv_layout(tmp_path):
    path, out = write_tiny(tmp_path)
    assert main(["run", path]) == 0
    with open(os.path.join(out, "density.csv")) as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    assert header == ["agent_index", "group", "t",
                      "p_S", "p_K", "p_I", "p_R"]
    # 4 agents x 41 nodes, agent-major ordering
    assert len(data) == 4 * 41
    agents = [int(r[0]) for r in data]
    assert agents == sorted(agents)
    assert [float(r[2]) for r in data[:41]] == pytest.approx(
        np.linspace(0.0, 2.0, 41).tolist())
    total = np.array([[float(v) for v in r[3:]] for r in data]).sum(axis=1)
    assert np.abs(total - 1.0).max() < 1e-8


def test_cli_values_and_controls_layout(tmp_path):
    path, out = write_tiny(tmp_path)
    assert main(["run", path]) == 0
    with open(os.path.join(out, "values.csv")) as fh:
        vrows = list(csv.reader(fh))
    assert vrows[0] == ["agent_index", "t", "u_S", "u_K", "u_I", "u_R"]
    # terminal values vanish
    last = vrows[41]
    assert [float(v) for v in last[2:]] == [0.0, 0.0, 0.0, 0.0]
    with open(os.path.join(out, "controls.csv")) as fh:
        crows = list(csv.reader(fh))
    assert crows[0] == ["agent_index", "t", "theta_S", "theta_K",
                        "theta_I", "theta_R"]
    assert all(float(r[5]) == 1.0 for r in crows[1:])


def test_cli_float_formatting_12_digits(tmp_path):
    path, out = write_tiny(tmp_path)
    main(["run", path])
    with open(os.path.join(out, "density.csv")) as fh:
        next(fh)
        cells = [line.strip().split(",")[3] for line in fh]
    # 12 significant digits: mantissa never longer than 13 chars with dot
    for cell in cells[:50]:
        digits = cell.split("e")[0].lstrip("-").replace(".", "").lstrip("0")
        assert len(digits) <= 12


def test_cli_seed_and_mode_overrides(tmp_path):
    path, out = write_tiny(tmp_path)
    assert main(["run", path, "--seed", "99"]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    assert report["config"]["population"]["seed"] == 99

    cfg_age = os.path.join(CONFIG_DIR, "age_groups.cfg")
    out2 = str(tmp_path / "age_ggne")
    assert main(["run", cfg_age, "--mode", "ggne", "--out", out2]) == 0
    report = json.load(open(os.path.join(out2, "report.json")))
    assert report["mode"] == "ggne_only"
    assert "lambda_star" not in report["results"]


def test_cli_nonconvergence_exits_3(tmp_path, capsys):
    path, out = write_tiny(tmp_path, solver="max_iter = 1\ntol = 1e-16")
    assert main(["run", path]) == 3
    report = json.load(open(os.path.join(out, "report.json")))
    assert not report["results"]["equilibrium"]["converged"]


def test_cli_validate_mc(tmp_path):
    path, out = write_tiny(
        tmp_path, mc="n_players = 80\nn_paths = 4\nseed = 5")
    assert main(["run", path, "--validate-mc"]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    mc = report["results"]["mc"]
    assert mc["n_players"] == 80 and mc["n_paths"] == 4
    assert 0.0 <= mc["sup_gap"] < 0.5
    with open(os.path.join(out, "density_mc.csv")) as fh:
        rows = list(csv.reader(fh))
    assert rows[1][0] == "-1"


def test_cli_decoupled_graphon_keeps_controls_flat(tmp_path):
    # zero interaction: densities evolve by mu/eta alone and theta stays 1
    path, out = write_tiny(tmp_path)
    text = open(path).read().replace("w0 = 0.5", "w0 = 0.0")
    open(path, "w").write(text)
    assert main(["run", path]) == 0
    with open(os.path.join(out, "controls.csv")) as fh:
        rows = list(csv.reader(fh))
    theta = np.array([[float(v) for v in r[2:]] for r in rows[1:]])
    assert np.all(theta == 1.0)
    report = json.load(open(os.path.join(out, "report.json")))
    assert report["results"]["equilibrium"]["iterations"] == 2


def test_cli_sgge_reports_dominance(tmp_path):
    path, out = write_tiny(
        tmp_path, policy="n_phi = 2\nn_psi = 2")
    text = open(path).read().replace('mode = "ggne_only"', 'mode = "sgge"')
    open(path, "w").write(text)
    assert main(["run", path]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    res = report["results"]
    assert res["j0_star"] <= res["j0_zero"] + 1e-12
    with open(os.path.join(out, "principal_table.csv")) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["phi_k", "psi_k", "j1", "converged", "iterations"]
    assert len(rows) == 5
    # the no-regulation comparison flows ship alongside the optimum
    names = {e["file"] for e in report["manifest"]}
    assert "density_baseline.csv" in names

"""CSV and JSON emission for solver and simulator outputs.

All files are long-format tables with a mandatory header row, floats at 12
significant digits, rows ordered agent-major then time, so they are
directly consumable by standard plotting tools.
"""

import csv
import json
import os


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if hasattr(value, "item"):  # numpy scalar
        return _fmt(value.item())
    return str(value)


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_density_csv(path, times, p, group_of, source=None):
    """Columns: agent_index, group, t, p_S, p_K, p_I, p_R (+ source)."""
    header = ["agent_index", "group", "t", "p_S", "p_K", "p_I", "p_R"]
    if source is not None:
        header.append("source")
    rows = []
    for x in range(p.shape[0]):
        for k, t in enumerate(times):
            row = [x, int(group_of[x]), float(t), *map(float, p[x, k])]
            if source is not None:
                row.append(source)
            rows.append(row)
    return _write_rows(path, header, rows)


def write_mc_density_csv(path, times, fractions):
    """Population fractions from the simulator; same layout as densities
    with agent_index = group = -1 and a source=mc column."""
    header = ["agent_index", "group", "t", "p_S", "p_K", "p_I", "p_R",
              "source"]
    rows = [[-1, -1, float(t), *map(float, fractions[k]), "mc"]
            for k, t in enumerate(times)]
    return _write_rows(path, header, rows)


def write_values_csv(path, times, u):
    header = ["agent_index", "t", "u_S", "u_K", "u_I", "u_R"]
    rows = [[x, float(t), *map(float, u[x, k])]
            for x in range(u.shape[0]) for k, t in enumerate(times)]
    return _write_rows(path, header, rows)


def write_aggregates_csv(path, times, z):
    header = ["agent_index", "t", "Z_K", "Z_I"]
    rows = [[x, float(t), float(z[x, k, 0]), float(z[x, k, 1])]
            for x in range(z.shape[0]) for k, t in enumerate(times)]
    return _write_rows(path, header, rows)


def write_controls_csv(path, times, theta):
    header = ["agent_index", "t", "theta_S", "theta_K", "theta_I",
              "theta_R"]
    rows = [[x, float(t), *map(float, theta[x, k])]
            for x in range(theta.shape[0]) for k, t in enumerate(times)]
    return _write_rows(path, header, rows)


def write_principal_table_csv(path, rows, duo=False):
    """Per-cell grid-search results; duo tables carry both policies."""
    if duo:
        header = ["phi_k", "psi_k", "phi_i", "psi_i", "j1", "j2",
                  "converged", "iterations"]
        keys = header
    else:
        header = ["phi_k", "psi_k", "j1", "converged", "iterations"]
        keys = header
    table = [[row[k] for k in keys] for row in rows]
    return _write_rows(path, header, table)


def write_nash_cells_csv(path, cells, pairs_k, pairs_i):
    header = ["i", "j", "phi_k", "psi_k", "phi_i", "psi_i", "j1", "j2"]
    rows = []
    for i, j, j1, j2 in cells:
        rows.append([i, j, *map(float, pairs_k[i]), *map(float, pairs_i[j]),
                     j1, j2])
    return _write_rows(path, header, rows)


def write_report_json(path, report: dict):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


def file_manifest(out_dir, names):
    """Existence-checked manifest entries (relative name, byte size)."""
    manifest = []
    for name in names:
        full = os.path.join(out_dir, name)
        size = os.path.getsize(full) if os.path.exists(full) else 0
        manifest.append({"file": name, "bytes": size})
    return manifest

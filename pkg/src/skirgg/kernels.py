"""Hot numerical kernels: forward/backward sweeps and the jump simulator.

Each kernel exists twice: a scalar-loop version compiled with numba when
available, and a vectorized pure-numpy version. Set SKIRGG_NO_NUMBA=1 to
force the numpy path; otherwise numba is used when importable. Both
variants are exported (IMPLEMENTATIONS) for equivalence tests and the
benchmark in benchmarks/bench_kernels.py.

Array layout conventions (shared with the solver layer):
  p, u, theta -- (n_agents, n_nodes, 4), state order S, K, I, R
  z           -- (n_agents, n_nodes, 2), columns (Z_K, Z_I)
  policies    -- (n_nodes,) per component; node i rules [t_i, t_{i+1})
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

USE_NUMBA = HAVE_NUMBA and os.environ.get("SKIRGG_NO_NUMBA", "") not in (
    "1", "true", "yes")

STATUS_OK = 0
STATUS_NEGATIVE = 1      # density below -1e-10: instability, not roundoff
STATUS_NONFINITE = 2
STATUS_RATECAP = 3       # realized jump rate exceeded the thinning bound

NEG_TOL = 1e-10


# =====================================================================
# Forward sweep (densities): dp/dt = p Q, field frozen per step
# =====================================================================

def _kfp_sweep_numpy(p0, theta, z, psi_k, psi_i,
                     bs, bk, bi, mk, mi, eta, dt, use_rk4):
    n, nodes, _ = theta.shape
    p = np.zeros((n, nodes, 4))
    p[:, 0] = p0
    for i in range(nodes - 1):
        th = theta[:, i]
        qsk = bs * th[:, 0] * z[:, i, 0] + psi_k[i]
        qsi = bs * th[:, 0] * z[:, i, 1] + psi_i[i]
        qki = bk * th[:, 1] * z[:, i, 1] + psi_i[i]
        qik = bi * th[:, 2] * z[:, i, 0] + psi_k[i]

        def rhs(pc):
            d = np.empty_like(pc)
            d[:, 0] = -(qsk + qsi) * pc[:, 0] + eta * pc[:, 3]
            d[:, 1] = qsk * pc[:, 0] - (qki + mk) * pc[:, 1] + qik * pc[:, 2]
            d[:, 2] = qsi * pc[:, 0] + qki * pc[:, 1] - (qik + mi) * pc[:, 2]
            d[:, 3] = mk * pc[:, 1] + mi * pc[:, 2] - eta * pc[:, 3]
            return d

        cur = p[:, i]
        if use_rk4:
            k1 = rhs(cur)
            k2 = rhs(cur + 0.5 * dt * k1)
            k3 = rhs(cur + 0.5 * dt * k2)
            k4 = rhs(cur + dt * k3)
            nxt = cur + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            nxt = cur + dt * rhs(cur)
        if not np.all(np.isfinite(nxt)):
            return p, STATUS_NONFINITE
        if nxt.min() < -NEG_TOL:
            return p, STATUS_NEGATIVE
        nxt = np.where(nxt < 0.0, 0.0, nxt)
        nxt = nxt / nxt.sum(axis=1, keepdims=True)
        p[:, i + 1] = nxt
    return p, STATUS_OK


@njit(cache=True)
def _kfp_sweep_loop(p0, theta, z, psi_k, psi_i,
                    bs, bk, bi, mk, mi, eta, dt, use_rk4):
    n, nodes, _ = theta.shape
    p = np.zeros((n, nodes, 4))
    stage = np.empty(4)
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    for x in range(n):
        for e in range(4):
            p[x, 0, e] = p0[x, e]
    for i in range(nodes - 1):
        for x in range(n):
            qsk = bs[x] * theta[x, i, 0] * z[x, i, 0] + psi_k[i]
            qsi = bs[x] * theta[x, i, 0] * z[x, i, 1] + psi_i[i]
            qki = bk[x] * theta[x, i, 1] * z[x, i, 1] + psi_i[i]
            qik = bi[x] * theta[x, i, 2] * z[x, i, 0] + psi_k[i]
            cur = p[x, i]
            if use_rk4:
                for s in range(4):
                    stage[s] = cur[s]
                _kfp_rhs(stage, qsk, qsi, qik, qki, mk[x], mi[x], eta[x], k1)
                for s in range(4):
                    stage[s] = cur[s] + 0.5 * dt * k1[s]
                _kfp_rhs(stage, qsk, qsi, qik, qki, mk[x], mi[x], eta[x], k2)
                for s in range(4):
                    stage[s] = cur[s] + 0.5 * dt * k2[s]
                _kfp_rhs(stage, qsk, qsi, qik, qki, mk[x], mi[x], eta[x], k3)
                for s in range(4):
                    stage[s] = cur[s] + dt * k3[s]
                _kfp_rhs(stage, qsk, qsi, qik, qki, mk[x], mi[x], eta[x], k4)
                for s in range(4):
                    p[x, i + 1, s] = cur[s] + (dt / 6.0) * (
                        k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s])
            else:
                for s in range(4):
                    stage[s] = cur[s]
                _kfp_rhs(stage, qsk, qsi, qik, qki, mk[x], mi[x], eta[x], k1)
                for s in range(4):
                    p[x, i + 1, s] = cur[s] + dt * k1[s]
            total = 0.0
            for s in range(4):
                v = p[x, i + 1, s]
                if not np.isfinite(v):
                    return p, STATUS_NONFINITE
                if v < -NEG_TOL:
                    return p, STATUS_NEGATIVE
                if v < 0.0:
                    p[x, i + 1, s] = 0.0
                else:
                    total += v
            for s in range(4):
                p[x, i + 1, s] /= total
    return p, STATUS_OK


@njit(cache=True, inline="always")
def _kfp_rhs(pc, qsk, qsi, qik, qki, mkx, mix, etax, out):
    out[0] = -(qsk + qsi) * pc[0] + etax * pc[3]
    out[1] = qsk * pc[0] - (qki + mkx) * pc[1] + qik * pc[2]
    out[2] = qsi * pc[0] + qki * pc[1] - (qik + mix) * pc[2]
    out[3] = mkx * pc[1] + mix * pc[2] - etax * pc[3]


# =====================================================================
# Backward sweep (values): du/dt = -H(u), controls re-minimized per stage
# =====================================================================

def _hjb_stage_numpy(u, zk, zi, phik, psik, phii, psii,
                     bs, bk, bi, mk, mi, eta, a_bar):
    u0, u1, u2, u3 = u[:, 0], u[:, 1], u[:, 2], u[:, 3]
    a_s = np.clip(1.0 + bs * (zk * (u0 - u1) + zi * (u0 - u2)), 0.0, a_bar)
    a_k = np.clip(1.0 + phik + bk * zi * (u1 - u2), 0.0, a_bar)
    a_i = np.clip(1.0 + phii + bi * zk * (u2 - u1), 0.0, a_bar)
    h_s = (0.5 * (1.0 - a_s) ** 2
           + (bs * a_s * zk + psik) * (u1 - u0)
           + (bs * a_s * zi + psii) * (u2 - u0))
    h_k = (0.5 * (1.0 - a_k) ** 2 - phik * a_k
           + (bk * a_k * zi + psii) * (u2 - u1) + mk * (u3 - u1))
    h_i = (0.5 * (1.0 - a_i) ** 2 - phii * a_i
           + (bi * a_i * zk + psik) * (u1 - u2) + mi * (u3 - u2))
    h_r = eta * (u0 - u3)
    return -np.stack((h_s, h_k, h_i, h_r), axis=1)


def _theta_snapshot_numpy(u, zk, zi, phik, phii, bs, bk, bi, a_bar):
    u0, u1, u2 = u[:, 0], u[:, 1], u[:, 2]
    th = np.empty((u.shape[0], 4))
    th[:, 0] = np.clip(1.0 + bs * (zk * (u0 - u1) + zi * (u0 - u2)),
                       0.0, a_bar)
    th[:, 1] = np.clip(1.0 + phik + bk * zi * (u1 - u2), 0.0, a_bar)
    th[:, 2] = np.clip(1.0 + phii + bi * zk * (u2 - u1), 0.0, a_bar)
    th[:, 3] = 1.0
    return th


def _hjb_sweep_numpy(z, phi_k, psi_k, phi_i, psi_i,
                     bs, bk, bi, mk, mi, eta, dt, use_rk4, a_bar):
    n, nodes, _ = z.shape
    u = np.zeros((n, nodes, 4))
    theta = np.empty((n, nodes, 4))
    theta[:, nodes - 1] = _theta_snapshot_numpy(
        u[:, nodes - 1], z[:, nodes - 1, 0], z[:, nodes - 1, 1],
        phi_k[nodes - 1], phi_i[nodes - 1], bs, bk, bi, a_bar)
    h = -dt
    for i in range(nodes - 2, -1, -1):
        zk, zi = z[:, i, 0], z[:, i, 1]
        args = (zk, zi, phi_k[i], psi_k[i], phi_i[i], psi_i[i],
                bs, bk, bi, mk, mi, eta, a_bar)
        cur = u[:, i + 1]
        if use_rk4:
            k1 = _hjb_stage_numpy(cur, *args)
            k2 = _hjb_stage_numpy(cur + 0.5 * h * k1, *args)
            k3 = _hjb_stage_numpy(cur + 0.5 * h * k2, *args)
            k4 = _hjb_stage_numpy(cur + h * k3, *args)
            nxt = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            nxt = cur + h * _hjb_stage_numpy(cur, *args)
        if not np.all(np.isfinite(nxt)):
            return u, theta, STATUS_NONFINITE
        u[:, i] = nxt
        theta[:, i] = _theta_snapshot_numpy(
            nxt, zk, zi, phi_k[i], phi_i[i], bs, bk, bi, a_bar)
    return u, theta, STATUS_OK


@njit(cache=True, inline="always")
def _clip01(v, hi):
    if v < 0.0:
        return 0.0
    if v > hi:
        return hi
    return v


@njit(cache=True, inline="always")
def _hjb_rhs(u, zk, zi, phik, psik, phii, psii,
             bsx, bkx, bix, mkx, mix, etax, a_bar, out):
    a_s = _clip01(1.0 + bsx * (zk * (u[0] - u[1]) + zi * (u[0] - u[2])), a_bar)
    a_k = _clip01(1.0 + phik + bkx * zi * (u[1] - u[2]), a_bar)
    a_i = _clip01(1.0 + phii + bix * zk * (u[2] - u[1]), a_bar)
    h_s = (0.5 * (1.0 - a_s) ** 2
           + (bsx * a_s * zk + psik) * (u[1] - u[0])
           + (bsx * a_s * zi + psii) * (u[2] - u[0]))
    h_k = (0.5 * (1.0 - a_k) ** 2 - phik * a_k
           + (bkx * a_k * zi + psii) * (u[2] - u[1]) + mkx * (u[3] - u[1]))
    h_i = (0.5 * (1.0 - a_i) ** 2 - phii * a_i
           + (bix * a_i * zk + psik) * (u[1] - u[2]) + mix * (u[3] - u[2]))
    h_r = etax * (u[0] - u[3])
    out[0] = -h_s
    out[1] = -h_k
    out[2] = -h_i
    out[3] = -h_r


@njit(cache=True)
def _hjb_sweep_loop(z, phi_k, psi_k, phi_i, psi_i,
                    bs, bk, bi, mk, mi, eta, dt, use_rk4, a_bar):
    n, nodes, _ = z.shape
    u = np.zeros((n, nodes, 4))
    theta = np.empty((n, nodes, 4))
    stage = np.empty(4)
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    h = -dt
    last = nodes - 1
    for x in range(n):
        theta[x, last, 0] = _clip01(1.0, a_bar)
        theta[x, last, 1] = _clip01(1.0 + phi_k[last], a_bar)
        theta[x, last, 2] = _clip01(1.0 + phi_i[last], a_bar)
        theta[x, last, 3] = 1.0
    for i in range(nodes - 2, -1, -1):
        for x in range(n):
            zk = z[x, i, 0]
            zi = z[x, i, 1]
            cur = u[x, i + 1]
            if use_rk4:
                for s in range(4):
                    stage[s] = cur[s]
                _hjb_rhs(stage, zk, zi, phi_k[i], psi_k[i], phi_i[i],
                         psi_i[i], bs[x], bk[x], bi[x], mk[x], mi[x],
                         eta[x], a_bar, k1)
                for s in range(4):
                    stage[s] = cur[s] + 0.5 * h * k1[s]
                _hjb_rhs(stage, zk, zi, phi_k[i], psi_k[i], phi_i[i],
                         psi_i[i], bs[x], bk[x], bi[x], mk[x], mi[x],
                         eta[x], a_bar, k2)
                for s in range(4):
                    stage[s] = cur[s] + 0.5 * h * k2[s]
                _hjb_rhs(stage, zk, zi, phi_k[i], psi_k[i], phi_i[i],
                         psi_i[i], bs[x], bk[x], bi[x], mk[x], mi[x],
                         eta[x], a_bar, k3)
                for s in range(4):
                    stage[s] = cur[s] + h * k3[s]
                _hjb_rhs(stage, zk, zi, phi_k[i], psi_k[i], phi_i[i],
                         psi_i[i], bs[x], bk[x], bi[x], mk[x], mi[x],
                         eta[x], a_bar, k4)
                for s in range(4):
                    u[x, i, s] = cur[s] + (h / 6.0) * (
                        k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s])
            else:
                for s in range(4):
                    stage[s] = cur[s]
                _hjb_rhs(stage, zk, zi, phi_k[i], psi_k[i], phi_i[i],
                         psi_i[i], bs[x], bk[x], bi[x], mk[x], mi[x],
                         eta[x], a_bar, k1)
                for s in range(4):
                    u[x, i, s] = cur[s] + h * k1[s]
            for s in range(4):
                if not np.isfinite(u[x, i, s]):
                    return u, theta, STATUS_NONFINITE
            uu = u[x, i]
            theta[x, i, 0] = _clip01(
                1.0 + bs[x] * (zk * (uu[0] - uu[1]) + zi * (uu[0] - uu[2])),
                a_bar)
            theta[x, i, 1] = _clip01(
                1.0 + phi_k[i] + bk[x] * zi * (uu[1] - uu[2]), a_bar)
            theta[x, i, 2] = _clip01(
                1.0 + phi_i[i] + bi[x] * zk * (uu[2] - uu[1]), a_bar)
            theta[x, i, 3] = 1.0
    return u, theta, STATUS_OK


# =====================================================================
# Finite-player jump simulator (thinning against a dominating rate)
# =====================================================================
# Players carry a type tau (an index into the sampled population); types
# share rates, controls, and graphon rows, so per-proposal aggregates only
# need per-type state counts: Z_K^j = (1/N) sum_tau W[tau_j, tau] *
# theta[tau, node, K] * count(tau, K). Counts update in O(1) per jump and
# are control-independent, so node crossings cost O(n_types).

def _mc_paths_numpy(w_types, type_of, p0, theta,
                    psi_k, psi_i, bs, bk, bi, mk, mi, eta,
                    grid, rate_cap, n_paths, seed, wbar):
    n_types = w_types.shape[0]
    n_players = type_of.shape[0]
    nodes = grid.shape[0]
    frac = np.zeros((n_paths, nodes, 4))
    zmean = np.zeros((n_paths, nodes, 2))
    total_rate = n_players * rate_cap
    for path in range(n_paths):
        rng = np.random.RandomState((seed + 7919 * path) & 0x7FFFFFFF)
        states = np.empty(n_players, dtype=np.int64)
        cnt = np.zeros((n_types, 4), dtype=np.int64)
        gcnt = np.zeros(4, dtype=np.int64)
        for i in range(n_players):
            tau = type_of[i]
            uu = rng.random_sample()
            acc = 0.0
            s = 3
            for e in range(3):
                acc += p0[tau, e]
                if uu < acc:
                    s = e
                    break
            states[i] = s
            cnt[tau, s] += 1
            gcnt[s] += 1
        node = 0
        th_k = theta[:, 0, 1].copy()
        th_i = theta[:, 0, 2].copy()
        frac[path, 0] = gcnt / n_players
        zmean[path, 0, 0] = np.dot(wbar, th_k * cnt[:, 1]) / n_players
        zmean[path, 0, 1] = np.dot(wbar, th_i * cnt[:, 2]) / n_players
        if total_rate <= 0.0:
            for k in range(1, nodes):
                frac[path, k] = frac[path, 0]
                zmean[path, k] = zmean[path, 0]
            continue
        t = 0.0
        done = False
        while not done:
            t = t + -np.log(1.0 - rng.random_sample()) / total_rate
            while t >= grid[node + 1]:
                node += 1
                th_k = theta[:, node, 1].copy()
                th_i = theta[:, node, 2].copy()
                frac[path, node] = gcnt / n_players
                zmean[path, node, 0] = np.dot(wbar, th_k * cnt[:, 1]) / n_players
                zmean[path, node, 1] = np.dot(wbar, th_i * cnt[:, 2]) / n_players
                if node == nodes - 1:
                    done = True
                    break
            if done:
                break
            j = min(int(rng.random_sample() * n_players), n_players - 1)
            v = rng.random_sample() * rate_cap
            tau = type_of[j]
            e = states[j]
            wrow = w_types[tau]
            if e == 0:
                zk = np.dot(wrow, th_k * cnt[:, 1]) / n_players
                zi = np.dot(wrow, th_i * cnt[:, 2]) / n_players
                alpha = theta[tau, node, 0]
                r1 = bs[tau] * alpha * zk + psi_k[node]   # -> K
                r2 = bs[tau] * alpha * zi + psi_i[node]   # -> I
                d1, d2, r3 = 1, 2, 0.0
            elif e == 1:
                zi = np.dot(wrow, th_i * cnt[:, 2]) / n_players
                alpha = theta[tau, node, 1]
                r1 = bk[tau] * alpha * zi + psi_i[node]   # -> I
                r2 = mk[tau]                              # -> R
                d1, d2, r3 = 2, 3, 0.0
            elif e == 2:
                zk = np.dot(wrow, th_k * cnt[:, 1]) / n_players
                alpha = theta[tau, node, 2]
                r1 = bi[tau] * alpha * zk + psi_k[node]   # -> K
                r2 = mi[tau]                              # -> R
                d1, d2, r3 = 1, 3, 0.0
            else:
                r1 = eta[tau]                             # -> S
                r2 = 0.0
                d1, d2, r3 = 0, 0, 0.0
            if r1 + r2 + r3 > rate_cap * (1.0 + 1e-9):
                return frac, zmean, STATUS_RATECAP
            if v < r1:
                dest = d1
            elif v < r1 + r2:
                dest = d2
            else:
                continue
            cnt[tau, e] -= 1
            cnt[tau, dest] += 1
            gcnt[e] -= 1
            gcnt[dest] += 1
            states[j] = dest
    return frac, zmean, STATUS_OK


@njit(cache=True)
def _mc_paths_loop(w_types, type_of, p0, theta,
                   psi_k, psi_i, bs, bk, bi, mk, mi, eta,
                   grid, rate_cap, n_paths, seed, wbar):
    n_types = w_types.shape[0]
    n_players = type_of.shape[0]
    nodes = grid.shape[0]
    frac = np.zeros((n_paths, nodes, 4))
    zmean = np.zeros((n_paths, nodes, 2))
    total_rate = n_players * rate_cap
    states = np.empty(n_players, dtype=np.int64)
    cnt = np.zeros((n_types, 4), dtype=np.int64)
    gcnt = np.zeros(4, dtype=np.int64)
    th_k = np.empty(n_types)
    th_i = np.empty(n_types)
    for path in range(n_paths):
        np.random.seed((seed + 7919 * path) & 0x7FFFFFFF)
        for tau in range(n_types):
            for e in range(4):
                cnt[tau, e] = 0
        for e in range(4):
            gcnt[e] = 0
        for i in range(n_players):
            tau = type_of[i]
            uu = np.random.random()
            acc = 0.0
            s = 3
            for e in range(3):
                acc += p0[tau, e]
                if uu < acc:
                    s = e
                    break
            states[i] = s
            cnt[tau, s] += 1
            gcnt[s] += 1
        node = 0
        zk_m = 0.0
        zi_m = 0.0
        for tau in range(n_types):
            th_k[tau] = theta[tau, 0, 1]
            th_i[tau] = theta[tau, 0, 2]
            zk_m += wbar[tau] * th_k[tau] * cnt[tau, 1]
            zi_m += wbar[tau] * th_i[tau] * cnt[tau, 2]
        for e in range(4):
            frac[path, 0, e] = gcnt[e] / n_players
        zmean[path, 0, 0] = zk_m / n_players
        zmean[path, 0, 1] = zi_m / n_players
        if total_rate <= 0.0:
            for k in range(1, nodes):
                for e in range(4):
                    frac[path, k, e] = frac[path, 0, e]
                zmean[path, k, 0] = zmean[path, 0, 0]
                zmean[path, k, 1] = zmean[path, 0, 1]
            continue
        t = 0.0
        done = False
        while not done:
            t = t + -np.log(1.0 - np.random.random()) / total_rate
            while t >= grid[node + 1]:
                node += 1
                zk_m = 0.0
                zi_m = 0.0
                for tau in range(n_types):
                    th_k[tau] = theta[tau, node, 1]
                    th_i[tau] = theta[tau, node, 2]
                    zk_m += wbar[tau] * th_k[tau] * cnt[tau, 1]
                    zi_m += wbar[tau] * th_i[tau] * cnt[tau, 2]
                for e in range(4):
                    frac[path, node, e] = gcnt[e] / n_players
                zmean[path, node, 0] = zk_m / n_players
                zmean[path, node, 1] = zi_m / n_players
                if node == nodes - 1:
                    done = True
                    break
            if done:
                break
            j = min(int(np.random.random() * n_players), n_players - 1)
            v = np.random.random() * rate_cap
            tau = type_of[j]
            e = states[j]
            r3 = 0.0
            if e == 0:
                zk = 0.0
                zi = 0.0
                for tt in range(n_types):
                    zk += w_types[tau, tt] * th_k[tt] * cnt[tt, 1]
                    zi += w_types[tau, tt] * th_i[tt] * cnt[tt, 2]
                zk /= n_players
                zi /= n_players
                alpha = theta[tau, node, 0]
                r1 = bs[tau] * alpha * zk + psi_k[node]
                r2 = bs[tau] * alpha * zi + psi_i[node]
                d1 = 1
                d2 = 2
            elif e == 1:
                zi = 0.0
                for tt in range(n_types):
                    zi += w_types[tau, tt] * th_i[tt] * cnt[tt, 2]
                zi /= n_players
                alpha = theta[tau, node, 1]
                r1 = bk[tau] * alpha * zi + psi_i[node]
                r2 = mk[tau]
                d1 = 2
                d2 = 3
            elif e == 2:
                zk = 0.0
                for tt in range(n_types):
                    zk += w_types[tau, tt] * th_k[tt] * cnt[tt, 1]
                zk /= n_players
                alpha = theta[tau, node, 2]
                r1 = bi[tau] * alpha * zk + psi_k[node]
                r2 = mi[tau]
                d1 = 1
                d2 = 3
            else:
                r1 = eta[tau]
                r2 = 0.0
                d1 = 0
                d2 = 0
            if r1 + r2 + r3 > rate_cap * (1.0 + 1e-9):
                return frac, zmean, STATUS_RATECAP
            if v < r1:
                dest = d1
            elif v < r1 + r2:
                dest = d2
            else:
                continue
            cnt[tau, e] -= 1
            cnt[tau, dest] += 1
            gcnt[e] -= 1
            gcnt[dest] += 1
            states[j] = dest
    return frac, zmean, STATUS_OK


# =====================================================================
# Dispatch
# =====================================================================

def kfp_sweep(*args, impl=None):
    fn = IMPLEMENTATIONS[impl or DEFAULT_IMPL]["kfp"]
    return fn(*args)


def hjb_sweep(*args, impl=None):
    fn = IMPLEMENTATIONS[impl or DEFAULT_IMPL]["hjb"]
    return fn(*args)


def mc_paths(*args, impl=None):
    fn = IMPLEMENTATIONS[impl or DEFAULT_IMPL]["mc"]
    return fn(*args)


IMPLEMENTATIONS = {
    "numpy": {"kfp": _kfp_sweep_numpy, "hjb": _hjb_sweep_numpy,
              "mc": _mc_paths_numpy},
}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {"kfp": _kfp_sweep_loop,
                                "hjb": _hjb_sweep_loop,
                                "mc": _mc_paths_loop}

DEFAULT_IMPL = "numba" if USE_NUMBA else "numpy"

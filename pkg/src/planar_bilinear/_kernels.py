"""Inner loops: fixed-step RK4 and the circle-grid rank scan.

Each kernel exists twice. The ``*_jit`` variants are numba-compiled loops;
the ``*_numpy`` variants are vectorised numpy (or plain Python where the
recurrence is inherently sequential). The public names at the bottom pick
one of them according to ``PLANAR_BILINEAR_JIT``.
"""

import math

import numpy as np

from ._accel import USE_JIT, njit

# planar states outside [NORM_FLOOR, NORM_CEIL] stop the integration
NORM_CEIL = 1e300
NORM_FLOOR = 1e-300


@njit(cache=True)
def planar_rk4_jit(m, x0, h, n):
    out = np.empty((n + 1, 2))
    a11, a12, a21, a22 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    x1, x2 = x0[0], x0[1]
    out[0, 0] = x1
    out[0, 1] = x2
    for k in range(n):
        k11 = a11 * x1 + a12 * x2
        k12 = a21 * x1 + a22 * x2
        y1 = x1 + 0.5 * h * k11
        y2 = x2 + 0.5 * h * k12
        k21 = a11 * y1 + a12 * y2
        k22 = a21 * y1 + a22 * y2
        y1 = x1 + 0.5 * h * k21
        y2 = x2 + 0.5 * h * k22
        k31 = a11 * y1 + a12 * y2
        k32 = a21 * y1 + a22 * y2
        y1 = x1 + h * k31
        y2 = x2 + h * k32
        k41 = a11 * y1 + a12 * y2
        k42 = a21 * y1 + a22 * y2
        x1 = x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        x2 = x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        nrm = math.hypot(x1, x2)
        if not (nrm <= NORM_CEIL and nrm >= NORM_FLOOR):
            return out[: k + 1], k
        out[k + 1, 0] = x1
        out[k + 1, 1] = x2
    return out, n


def rk4_step_matrix(m, h):
    """The linear map one classical RK4 step applies to ``x' = M x``."""
    hm = h * np.asarray(m, dtype=float)
    hm2 = hm @ hm
    hm3 = hm2 @ hm
    return np.eye(2) + hm + hm2 / 2.0 + hm3 / 6.0 + (hm3 @ hm) / 24.0


def planar_rk4_numpy(m, x0, h, n):
    # x_k = T^k x0, built by doubling: O(log n) numpy calls
    step = rk4_step_matrix(m, h)
    states = np.asarray(x0, dtype=float).reshape(1, 2)
    power = step
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        while states.shape[0] < n + 1:
            states = np.vstack([states, states @ power.T])
            power = power @ power
        states = states[: n + 1]
        norms = np.hypot(states[:, 0], states[:, 1])
    bad = np.flatnonzero(~((norms <= NORM_CEIL) & (norms >= NORM_FLOOR)))
    if bad.size:
        k = int(bad[0])
        return states[:k].copy(), k - 1
    return states, n


@njit(cache=True)
def angular_rk4_jit(p, q, r, theta0, h, n):
    out = np.empty(n + 1)
    th = theta0
    out[0] = th
    for k in range(n):
        f1 = 0.5 * (p * math.cos(2.0 * th) + q * math.sin(2.0 * th) + r)
        t2 = 2.0 * (th + 0.5 * h * f1)
        f2 = 0.5 * (p * math.cos(t2) + q * math.sin(t2) + r)
        t3 = 2.0 * (th + 0.5 * h * f2)
        f3 = 0.5 * (p * math.cos(t3) + q * math.sin(t3) + r)
        t4 = 2.0 * (th + h * f3)
        f4 = 0.5 * (p * math.cos(t4) + q * math.sin(t4) + r)
        th = th + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        out[k + 1] = th
    return out


def angular_rk4_numpy(p, q, r, theta0, h, n):
    # sequential recurrence: plain floats beat per-step array allocation
    out = np.empty(n + 1)
    cos, sin = math.cos, math.sin
    th = float(theta0)
    out[0] = th
    for k in range(n):
        f1 = 0.5 * (p * cos(2.0 * th) + q * sin(2.0 * th) + r)
        t2 = 2.0 * th + h * f1
        f2 = 0.5 * (p * cos(t2) + q * sin(t2) + r)
        t3 = 2.0 * th + h * f2
        f3 = 0.5 * (p * cos(t3) + q * sin(t3) + r)
        t4 = 2.0 * th + 2.0 * h * f3
        f4 = 0.5 * (p * cos(t4) + q * sin(t4) + r)
        th = th + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        out[k + 1] = th
    return out


@njit(cache=True)
def grid_ranks_jit(gens, n_points, eps):
    """Rank of span{M_i x} at ``n_points`` directions ``x`` on the half circle."""
    k = gens.shape[0]
    scale = 1.0
    for i in range(k):
        for a in range(2):
            for b in range(2):
                v = abs(gens[i, a, b])
                if 2.0 * v + 1.0 > scale:
                    scale = 2.0 * v + 1.0
    col_tol = eps * scale
    minor_tol = eps * scale * scale
    ranks = np.zeros(n_points, dtype=np.int64)
    cols = np.empty((k, 2))
    for j in range(n_points):
        ang = math.pi * j / n_points
        x1 = math.cos(ang)
        x2 = math.sin(ang)
        biggest = 0.0
        for i in range(k):
            c1 = gens[i, 0, 0] * x1 + gens[i, 0, 1] * x2
            c2 = gens[i, 1, 0] * x1 + gens[i, 1, 1] * x2
            cols[i, 0] = c1
            cols[i, 1] = c2
            nrm = math.sqrt(c1 * c1 + c2 * c2)
            if nrm > biggest:
                biggest = nrm
        if biggest <= col_tol:
            ranks[j] = 0
            continue
        rank = 1
        for i in range(k):
            for l in range(i + 1, k):
                minor = cols[i, 0] * cols[l, 1] - cols[i, 1] * cols[l, 0]
                if abs(minor) > minor_tol:
                    rank = 2
                    break
            if rank == 2:
                break
        ranks[j] = rank
    return ranks


def grid_ranks_numpy(gens, n_points, eps):
    gens = np.asarray(gens, dtype=float).reshape(-1, 2, 2)
    scale = 1.0 + 2.0 * (np.abs(gens).max() if gens.size else 0.0)
    ang = np.pi * np.arange(n_points) / n_points
    xs = np.stack([np.cos(ang), np.sin(ang)])  # (2, n)
    cols = np.einsum("kab,bn->kna", gens, xs)  # (k, n, 2)
    biggest = np.linalg.norm(cols, axis=2).max(axis=0) if len(gens) else np.zeros(n_points)
    minors = (cols[:, None, :, 0] * cols[None, :, :, 1]
              - cols[:, None, :, 1] * cols[None, :, :, 0])  # (k, k, n)
    max_minor = np.abs(minors).reshape(-1, n_points).max(axis=0) if len(gens) else np.zeros(n_points)
    ranks = np.where(max_minor > eps * scale * scale, 2, 1)
    ranks[biggest <= eps * scale] = 0
    return ranks.astype(np.int64)


if USE_JIT:
    planar_rk4 = planar_rk4_jit
    angular_rk4 = angular_rk4_jit
    grid_ranks = grid_ranks_jit
else:
    planar_rk4 = planar_rk4_numpy
    angular_rk4 = angular_rk4_numpy
    grid_ranks = grid_ranks_numpy

BACKEND = "numba" if USE_JIT else "numpy"

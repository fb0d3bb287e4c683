"""Independent reference implementations used only by the tests.

None of these share code with the package: they are slow, direct
transcriptions of the definitions.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import minimize


def grid_edges(nx, ny, hx, hy):
    """All directed 8-neighbour edges (a, b, length) of an nx x ny cell grid."""
    edges = []
    for j in range(ny):
        for i in range(nx):
            a = j * nx + i
            for di, dj in itertools.product((-1, 0, 1), repeat=2):
                if di == dj == 0:
                    continue
                ii, jj = i + di, j + dj
                if 0 <= ii < nx and 0 <= jj < ny:
                    edges.append((a, jj * nx + ii, math.sqrt((di * hx) ** 2 + (dj * hy) ** 2)))
    return edges


def bellman_ford(weight, nx, ny, hx, hy, source):
    """Shortest paths with labels compared as (distance, edge count).

    The predecessor of a node is the lowest-index neighbour whose label,
    extended by one edge, reproduces the node's label exactly.
    """
    n = nx * ny
    w = np.asarray(weight, dtype=np.float64)
    edges = grid_edges(nx, ny, hx, hy)
    dist = [math.inf] * n
    hops = [math.inf] * n
    dist[source], hops[source] = 0.0, 0
    for _ in range(2 * n + 2):
        changed = False
        for a, b, ell in edges:
            if dist[a] == math.inf:
                continue
            nd = dist[a] + ell * (w[a] + w[b]) / 2.0
            nh = hops[a] + 1
            if (nd, nh) < (dist[b], hops[b]):
                dist[b], hops[b] = nd, nh
                changed = True
        if not changed:
            break
    pred = [-1] * n
    for a, b, ell in edges:
        if b == source or dist[a] == math.inf:
            continue
        if dist[a] + ell * (w[a] + w[b]) / 2.0 == dist[b] and hops[a] + 1 == hops[b]:
            if pred[b] == -1 or a < pred[b]:
                pred[b] = a
    return np.array(dist), np.array(pred), np.array(hops)


def mc_disk_log_interaction(radius, n_pairs, seed=0, chunk=1_000_000):
    """Monte Carlo estimate of the log interaction of a disk: (mean, standard error)."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_pairs:
        m = min(chunk, n_pairs - done)
        r1 = radius * np.sqrt(rng.random(m))
        r2 = radius * np.sqrt(rng.random(m))
        t1 = 2 * np.pi * rng.random(m)
        t2 = 2 * np.pi * rng.random(m)
        d = np.hypot(r1 * np.cos(t1) - r2 * np.cos(t2), r1 * np.sin(t1) - r2 * np.sin(t2))
        v = -np.log(d)
        total += v.sum()
        total_sq += (v * v).sum()
        done += m
    area = np.pi * radius**2
    mean = total / n_pairs
    var = total_sq / n_pairs - mean * mean
    return mean * area * area, math.sqrt(var / n_pairs) * area * area


def direct_steiner(points):
    """Minimum over all full topologies for n <= 4 by generic numerical optimisation."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 3:
        res = minimize(lambda s: np.linalg.norm(pts - s, axis=1).sum(), pts.mean(0),
                       method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        return float(res.fun)
    if n == 4:
        best = math.inf
        for pair in ((0, 1), (0, 2), (0, 3)):
            other = tuple(k for k in range(4) if k not in pair)

            def length(z, pair=pair, other=other):
                s, t = z[:2], z[2:]
                return (sum(np.linalg.norm(pts[k] - s) for k in pair)
                        + sum(np.linalg.norm(pts[k] - t) for k in other) + np.linalg.norm(s - t))

            z0 = np.concatenate([pts[list(pair)].mean(0), pts[list(other)].mean(0)])
            res = minimize(length, z0, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 40000})
            best = min(best, float(res.fun))
        return best
    raise ValueError("direct_steiner handles n = 3 or 4")


def random_smooth_field(rng, grid, bumps=3):
    """Sum of a few randomly placed Gaussian bumps, scaled into [0, 1]."""
    X, Y = grid.mesh()
    (x0, x1, y0, y1), size = grid.extents, min(grid.x_max - grid.x_min, grid.y_max - grid.y_min)
    u = np.zeros(grid.shape)
    for _ in range(bumps):
        cx, cy = rng.uniform(x0, x1), rng.uniform(y0, y1)
        s = rng.uniform(0.08, 0.25) * size
        u += rng.uniform(0.5, 1.0) * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * s * s))
    return 0.97 * u / u.max()


def fd_directional(value_fn, u, direction, h):
    return (value_fn(u + h * direction) - value_fn(u - h * direction)) / (2 * h)

"""Euclidean Steiner minimal trees for small terminal sets.

n <= 3 is solved in closed form (Fermat point). For 4 <= n <= 8 full
Steiner topologies are enumerated by inserting terminals one at a time into
an edge of the current tree, each partial tree is relaxed to its minimum
length, and partial trees already longer than the best complete tree are
pruned. Collapsed Steiner points reproduce the degenerate topologies.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from . import kernels

MAX_TERMINALS = 8
_SWEEPS = 5000
_TOL = 1e-13


def mst_length(points) -> float:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        return 0.0
    return float(minimum_spanning_tree(squareform(pdist(pts))).sum())


def fermat_point(a, b, c) -> np.ndarray:
    """Point minimising the summed distance to ``a``, ``b``, ``c``.

    Returns the obtuse vertex when an angle is at least 120 degrees, else the
    isogonic centre via trilinear coordinates.
    """
    a, b, c = (np.asarray(p, dtype=np.float64) for p in (a, b, c))
    la, lb, lc = np.linalg.norm(b - c), np.linalg.norm(c - a), np.linalg.norm(a - b)
    for vertex, opp, s1, s2 in ((a, la, lb, lc), (b, lb, lc, la), (c, lc, la, lb)):
        if s1 == 0 or s2 == 0:
            return vertex
        cos_v = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2)
        if cos_v <= -0.5:
            return vertex
    ang_a = math.acos(np.clip((lb * lb + lc * lc - la * la) / (2 * lb * lc), -1, 1))
    ang_b = math.acos(np.clip((lc * lc + la * la - lb * lb) / (2 * lc * la), -1, 1))
    ang_c = math.pi - ang_a - ang_b
    # trilinears csc(A + 60 deg) : ... converted to barycentrics
    wa = la / math.sin(ang_a + math.pi / 3)
    wb = lb / math.sin(ang_b + math.pi / 3)
    wc = lc / math.sin(ang_c + math.pi / 3)
    return (wa * a + wb * b + wc * c) / (wa + wb + wc)


def _three_point(pts: np.ndarray) -> float:
    f = fermat_point(*pts)
    return float(sum(np.linalg.norm(f - p) for p in pts))


def _neighbours(edges, n_fixed, m):
    nbr = [[] for _ in range(m)]
    for a, b in edges:
        if a >= n_fixed:
            nbr[a - n_fixed].append(b)
        if b >= n_fixed:
            nbr[b - n_fixed].append(a)
    return np.array(nbr, dtype=np.int64).reshape(m, 3)


def _relax(pts, edges, k, steiner_xy):
    """Relax the full tree on terminals 0..k-1 (k >= 3); returns (length, Steiner xy)."""
    m = k - 2
    xy = np.empty((2 * k - 2, 2))
    xy[:k] = pts[:k]
    xy[k:] = steiner_xy
    # renumber Steiner nodes so that they follow the first k terminals
    remap = {i: i for i in range(k)}
    for s in range(m):
        remap[len(pts) + s] = k + s
    local = [(remap[a], remap[b]) for a, b in edges]
    nbr = _neighbours(local, k, m)
    length = kernels.steiner_relax(xy, nbr, k, _SWEEPS, _TOL)
    return length, xy[k:].copy()


def _mst_edges(pts: np.ndarray) -> list[tuple[int, int]]:
    tree = minimum_spanning_tree(squareform(pdist(pts))).tocoo()
    return [(int(a), int(b)) for a, b in zip(tree.row, tree.col)]


def steiner_tree(points):
    """Shortest network on ``points``.

    Returns ``(length, steiner_xy, edges)``; edge endpoints index the stacked
    array ``[points; steiner_xy]``.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    if n < 1 or n > MAX_TERMINALS:
        raise ValueError(f"steiner_length supports 1..{MAX_TERMINALS} terminals, got {n}")
    if n == 1:
        return 0.0, np.empty((0, 2)), []
    if n == 2:
        return float(np.linalg.norm(pts[1] - pts[0])), np.empty((0, 2)), [(0, 1)]
    if n == 3:
        f = fermat_point(*pts)
        return _three_point(pts), f.reshape(1, 2), [(0, 3), (1, 3), (2, 3)]

    mst = mst_length(pts)
    # Insertion order: start from a far-apart pair to tighten early bounds.
    order = _insertion_order(pts)
    pts = pts[order]
    best = [mst, None, None]
    s0 = n  # Steiner node ids are n, n+1, ...

    def recurse(edges, k, steiner_xy):
        length, steiner_xy = _relax(pts, edges, k, steiner_xy)
        if length >= best[0] * (1 + 1e-12):
            return
        if k == n:
            best[:] = [length, steiner_xy, edges]
            return
        new_s = s0 + k - 2
        for idx, (a, b) in enumerate(edges):
            pa = pts[a] if a < n else steiner_xy[a - s0]
            pb = pts[b] if b < n else steiner_xy[b - s0]
            seed = (pa + pb + pts[k]) / 3.0
            new_edges = edges[:idx] + edges[idx + 1:] + [(a, new_s), (new_s, b), (new_s, k)]
            recurse(new_edges, k + 1, np.vstack([steiner_xy, seed]))

    centroid = pts[:3].mean(axis=0, keepdims=True)
    recurse([(0, s0), (1, s0), (2, s0)], 3, centroid)
    if best[1] is None:
        return mst, np.empty((0, 2)), _mst_edges(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    back = {i: int(order[i]) for i in range(n)}
    edges = [(back.get(a, a), back.get(b, b)) for a, b in best[2]]
    return best[0], best[1], edges


def _insertion_order(pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    d = squareform(pdist(pts))
    i, j = np.unravel_index(np.argmax(d), d.shape)
    order = [int(i), int(j)]
    rest = set(range(n)) - set(order)
    while rest:
        nxt = max(rest, key=lambda r: min(d[r, o] for o in order))
        order.append(nxt)
        rest.remove(nxt)
    return np.array(order)


def steiner_length(points) -> float:
    return steiner_tree(points)[0]

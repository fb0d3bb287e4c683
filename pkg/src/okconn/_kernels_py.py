"""Pure-Python versions of the hot kernels.

These mirror ``_ckernels.pyx`` operation for operation so that both
backends return bit-identical results. They are used when the compiled
extension is unavailable, and as the reference in the backend tests.
"""
from heapq import heappop, heappush
import math

import numpy as np

# 8-neighbour stencil as (di, dj) with di along x, dj along y.
OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


def edge_lengths(hx, hy):
    diag = math.sqrt(hx * hx + hy * hy)
    return (hx, hx, hy, hy, diag, diag, diag, diag)


def dijkstra(weight, nx, ny, hx, hy, source):
    """Single-source geodesic distances on the 8-neighbour grid graph.

    Labels are compared lexicographically as (distance, hop count); the
    predecessor of a node is the lowest-index neighbour attaining its label.
    Returns ``(dist, pred, hops, order)`` where ``order`` is the settle order.
    """
    weight = np.ascontiguousarray(weight, dtype=np.float64).ravel()
    n = nx * ny
    lengths = edge_lengths(hx, hy)
    dist = [math.inf] * n
    hops = [-1] * n
    pred = [-1] * n
    done = [False] * n
    order = []
    w = weight.tolist()

    dist[source] = 0.0
    hops[source] = 0
    heap = [(0.0, 0, source)]
    while heap:
        d, k, a = heappop(heap)
        if done[a]:
            continue
        done[a] = True
        order.append(a)
        ia = a % nx
        ja = a // nx
        wa = w[a]
        for e in range(8):
            di, dj = OFFSETS[e]
            ib = ia + di
            jb = ja + dj
            if ib < 0 or ib >= nx or jb < 0 or jb >= ny:
                continue
            b = jb * nx + ib
            if done[b]:
                continue
            nd = d + lengths[e] * (wa + w[b]) / 2.0
            nk = k + 1
            if nd < dist[b] or (nd == dist[b] and (nk < hops[b] or (nk == hops[b] and a < pred[b]))):
                dist[b] = nd
                hops[b] = nk
                pred[b] = a
                heappush(heap, (nd, nk, b))
    return (
        np.array(dist, dtype=np.float64),
        np.array(pred, dtype=np.int64),
        np.array(hops, dtype=np.int64),
        np.array(order, dtype=np.int64),
    )


def tree_edge_loads(pred, order, target_weight, nx, hx, hy):
    """Per-node load from the shortest-path tree.

    For every tree edge (pred[v], v) the subtree mass W_v = sum of
    ``target_weight`` over the subtree rooted at v is formed, and half of
    ``length * W_v`` is credited to each endpoint. The result, multiplied by
    psi'(u) at a node, is the derivative of sum_y t_y d(x, y) w.r.t. u there.
    """
    lengths = edge_lengths(hx, hy)
    sub = np.array(target_weight, dtype=np.float64).ravel().tolist()
    load = [0.0] * len(sub)
    p = pred.tolist()
    for v in reversed(order.tolist()):
        a = p[v]
        if a < 0:
            continue
        di = v % nx - a % nx
        dj = v // nx - a // nx
        ell = lengths[OFFSETS.index((di, dj))]
        share = ell * sub[v] / 2.0
        load[v] += share
        load[a] += share
        sub[a] += sub[v]
    return np.array(load, dtype=np.float64)


def steiner_relax(xy, nbr, n_fixed, max_sweeps, tol):
    """Gauss-Seidel Weiszfeld sweeps over the Steiner points of a full topology.

    ``xy`` holds terminals in its first ``n_fixed`` rows and Steiner points
    after; ``nbr[s]`` lists the three neighbours of Steiner point ``n_fixed+s``.
    Updates ``xy`` in place and returns the tree length.
    """
    m = nbr.shape[0]
    pts = xy.tolist()
    nb = nbr.tolist()
    for _ in range(max_sweeps):
        moved = 0.0
        for s in range(m):
            sx, sy = pts[n_fixed + s]
            wsum = 0.0
            ax = 0.0
            ay = 0.0
            for q in nb[s]:
                px, py = pts[q]
                d = math.hypot(sx - px, sy - py)
                if d < 1e-15:
                    d = 1e-15
                wsum += 1.0 / d
                ax += px / d
                ay += py / d
            nx_ = ax / wsum
            ny_ = ay / wsum
            step = math.hypot(nx_ - sx, ny_ - sy)
            if step > moved:
                moved = step
            pts[n_fixed + s] = [nx_, ny_]
        if moved < tol:
            break
    xy[:] = pts
    return tree_length(xy, nbr, n_fixed)


def tree_length(xy, nbr, n_fixed):
    total = 0.0
    for s in range(nbr.shape[0]):
        a = n_fixed + s
        for q in nbr[s]:
            # Steiner-Steiner edges are listed twice; count them once.
            if q >= n_fixed and q < a:
                continue
            total += math.hypot(xy[a, 0] - xy[q, 0], xy[a, 1] - xy[q, 1])
    return total

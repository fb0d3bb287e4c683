# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics match ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot, INFINITY

cnp.import_array()

cdef int DI[8]
cdef int DJ[8]
DI[:] = [1, -1, 0, 0, 1, 1, -1, -1]
DJ[:] = [0, 0, 1, -1, 1, -1, 1, -1]


cdef struct Entry:
    double d
    long k
    long node


cdef inline bint _less(Entry a, Entry b) nogil:
    if a.d != b.d:
        return a.d < b.d
    if a.k != b.k:
        return a.k < b.k
    return a.node < b.node


cdef void _push(Entry* heap, long* size, Entry e) nogil:
    cdef long i = size[0]
    cdef long parent
    size[0] += 1
    heap[i] = e
    while i > 0:
        parent = (i - 1) >> 1
        if _less(heap[i], heap[parent]):
            heap[i], heap[parent] = heap[parent], heap[i]
            i = parent
        else:
            break


cdef Entry _pop(Entry* heap, long* size) nogil:
    cdef Entry top = heap[0]
    cdef long i = 0, l, r, m
    size[0] -= 1
    heap[0] = heap[size[0]]
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < size[0] and _less(heap[l], heap[m]):
            m = l
        if r < size[0] and _less(heap[r], heap[m]):
            m = r
        if m == i:
            break
        heap[i], heap[m] = heap[m], heap[i]
        i = m
    return top


def dijkstra(weight, long nx, long ny, double hx, double hy, long source):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(weight, dtype=np.float64).ravel()
    cdef long n = nx * ny
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.full(n, np.inf)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hops = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done = np.zeros(n, dtype=np.uint8)
    # Each node is pushed at most 8 times plus the source.
    cdef cnp.ndarray heap_buf = np.empty((8 * n + 1) * sizeof(Entry), dtype=np.uint8)
    cdef Entry* heap = <Entry*> cnp.PyArray_DATA(heap_buf)
    cdef long size = 0, n_done = 0
    cdef double lengths[8]
    cdef double diag = sqrt(hx * hx + hy * hy)
    cdef Entry cur, nxt
    cdef long a, b, ia, ja, ib, jb, e, nk
    cdef double nd, wa
    lengths[0] = hx; lengths[1] = hx; lengths[2] = hy; lengths[3] = hy
    lengths[4] = diag; lengths[5] = diag; lengths[6] = diag; lengths[7] = diag

    dist[source] = 0.0
    hops[source] = 0
    cur.d = 0.0; cur.k = 0; cur.node = source
    _push(heap, &size, cur)
    with nogil:
        while size > 0:
            cur = _pop(heap, &size)
            a = cur.node
            if done[a]:
                continue
            done[a] = 1
            order[n_done] = a
            n_done += 1
            ia = a % nx
            ja = a // nx
            wa = w[a]
            for e in range(8):
                ib = ia + DI[e]
                jb = ja + DJ[e]
                if ib < 0 or ib >= nx or jb < 0 or jb >= ny:
                    continue
                b = jb * nx + ib
                if done[b]:
                    continue
                nd = cur.d + lengths[e] * (wa + w[b]) / 2.0
                nk = cur.k + 1
                if nd < dist[b] or (nd == dist[b] and (nk < hops[b] or (nk == hops[b] and a < pred[b]))):
                    dist[b] = nd
                    hops[b] = nk
                    pred[b] = a
                    nxt.d = nd; nxt.k = nk; nxt.node = b
                    _push(heap, &size, nxt)
    return dist, pred, hops, order[:n_done]


def tree_edge_loads(pred_in, order_in, target_weight, long nx, double hx, double hy):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred = np.ascontiguousarray(pred_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.ascontiguousarray(order_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sub = np.array(target_weight, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] load = np.zeros(sub.shape[0])
    cdef double diag = sqrt(hx * hx + hy * hy)
    cdef double ell, share
    cdef long t, v, a, di, dj
    with nogil:
        for t in range(order.shape[0] - 1, -1, -1):
            v = order[t]
            a = pred[v]
            if a < 0:
                continue
            di = v % nx - a % nx
            dj = v // nx - a // nx
            if dj == 0:
                ell = hx
            elif di == 0:
                ell = hy
            else:
                ell = diag
            share = ell * sub[v] / 2.0
            load[v] += share
            load[a] += share
            sub[a] += sub[v]
    return load


def steiner_relax(double[:, ::1] xy, long[:, ::1] nbr, long n_fixed, long max_sweeps, double tol):
    cdef long m = nbr.shape[0]
    cdef long it, s, t, q
    cdef double sx, sy, px, py, d, wsum, ax, ay, nx_, ny_, step, moved
    with nogil:
        for it in range(max_sweeps):
            moved = 0.0
            for s in range(m):
                sx = xy[n_fixed + s, 0]
                sy = xy[n_fixed + s, 1]
                wsum = 0.0
                ax = 0.0
                ay = 0.0
                for t in range(3):
                    q = nbr[s, t]
                    px = xy[q, 0]
                    py = xy[q, 1]
                    d = hypot(sx - px, sy - py)
                    if d < 1e-15:
                        d = 1e-15
                    wsum += 1.0 / d
                    ax += px / d
                    ay += py / d
                nx_ = ax / wsum
                ny_ = ay / wsum
                step = hypot(nx_ - sx, ny_ - sy)
                if step > moved:
                    moved = step
                xy[n_fixed + s, 0] = nx_
                xy[n_fixed + s, 1] = ny_
            if moved < tol:
                break
    return tree_length(xy, nbr, n_fixed)


def tree_length(double[:, ::1] xy, long[:, ::1] nbr, long n_fixed):
    cdef long s, t, a, q
    cdef double total = 0.0
    for s in range(nbr.shape[0]):
        a = n_fixed + s
        for t in range(3):
            q = nbr[s, t]
            if q >= n_fixed and q < a:
                continue
            total += hypot(xy[a, 0] - xy[q, 0], xy[a, 1] - xy[q, 1])
    return total

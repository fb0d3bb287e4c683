"""Compare the compiled kernels with their pure-Python twins.

    python benchmarks/bench_kernels.py [--sizes 32 64 96] [--repeat 5]

Prints one line per kernel and grid size with the best wall time of each
backend and the speed-up. Results are also checked for bit equality.
"""
import argparse
import time

import numpy as np

from okconn import _kernels_py as py

try:
    from okconn import _ckernels as cy
except ImportError:  # pragma: no cover - depends on the build
    cy = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_grid(n, repeat, rng):
    h = 1.0 / n
    w = rng.random(n * n)
    src = n * n // 2
    rows = []
    tp, rp = best_of(lambda: py.dijkstra(w, n, n, h, h, src), repeat)
    tc, rc = best_of(lambda: cy.dijkstra(w, n, n, h, h, src), repeat)
    same = all(np.array_equal(a, b) for a, b in zip(rp, rc))
    rows.append(("dijkstra", n, tp, tc, same))
    target = rng.random(n * n)
    tp, lp = best_of(lambda: py.tree_edge_loads(rp[1], rp[3], target, n, h, h), repeat)
    tc, lc = best_of(lambda: cy.tree_edge_loads(rc[1], rc[3], target, n, h, h), repeat)
    rows.append(("tree_edge_loads", n, tp, tc, np.array_equal(lp, lc)))
    return rows


def bench_steiner(repeat, rng):
    pts = rng.random((4, 2))
    nbr = np.array([[0, 1, 5], [2, 3, 4]], dtype=np.int64)
    start = np.vstack([pts, [[0.4, 0.5], [0.6, 0.5]]])
    tp, lp = best_of(lambda: py.steiner_relax(start.copy(), nbr, 4, 5000, 1e-13), repeat)
    tc, lc = best_of(lambda: cy.steiner_relax(start.copy(), nbr, 4, 5000, 1e-13), repeat)
    return [("steiner_relax", 4, tp, tc, lp == lc)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 96])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    rows = []
    for n in args.sizes:
        rows += bench_grid(n, args.repeat, rng)
    rows += bench_steiner(args.repeat, rng)
    print(f"{'kernel':<16} {'n':>4} {'python [ms]':>12} {'cython [ms]':>12} {'speed-up':>9}  identical")
    for name, n, tp, tc, same in rows:
        print(f"{name:<16} {n:>4} {1e3 * tp:>12.3f} {1e3 * tc:>12.3f} {tp / tc:>8.1f}x  {same}")


if __name__ == "__main__":
    main()

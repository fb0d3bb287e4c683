"""Geodesic connectedness penalties C1 (phase u ~ 1) and C2 (phase u ~ 0).

C(u) = sum_x sum_y beta(u_x) beta(u_y) d(x, y) A^2, where d is the shortest
path distance on the 8-neighbour grid graph with node weight psi(u) and A is
the cell area. The phase ``"zero"`` variant substitutes ``1 - u``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .grid import ScalarField
from .params import ModelParams

PHASES = ("one", "zero")


@dataclass(frozen=True)
class GeodesicResult:
    source: int
    dist: np.ndarray
    pred: np.ndarray
    hops: np.ndarray
    order: np.ndarray

    def path_to(self, node: int) -> list[int]:
        """Nodes from the source to ``node`` along predecessor links."""
        path = [node]
        while self.pred[path[-1]] >= 0:
            path.append(int(self.pred[path[-1]]))
        return path[::-1]


@dataclass(frozen=True)
class PairSampling:
    """Which source nodes get a Dijkstra run.

    ``mode="all"`` uses every node with beta > 0. ``mode="stratified"`` splits
    those nodes (in index order) into ``max_sources`` contiguous strata and
    draws one source per stratum, weighted by the stratum size.
    """

    mode: str = "stratified"
    max_sources: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("all", "stratified"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.max_sources < 1:
            raise ValueError("max_sources must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


def beta_eps(s, alpha, c1):
    s = np.asarray(s, dtype=np.float64)
    t = s - 1.0 + alpha
    return np.where(t > 0, 0.5 * c1 * t * t, 0.0)


def beta_eps_prime(s, alpha, c1):
    s = np.asarray(s, dtype=np.float64)
    t = s - 1.0 + alpha
    return np.where(t > 0, c1 * t, 0.0)


def psi_eps(s, alpha):
    s = np.asarray(s, dtype=np.float64)
    t = s - 1.0 + alpha
    return np.where(t < 0, 0.5 * t * t, 0.0)


def psi_eps_prime(s, alpha):
    s = np.asarray(s, dtype=np.float64)
    t = s - 1.0 + alpha
    return np.where(t < 0, t, 0.0)


def geodesic_from(source: int, weight: ScalarField) -> GeodesicResult:
    """Shortest paths from ``source`` with edge cost |x_a - x_b| (w_a + w_b) / 2.

    Ties in distance go to the path with fewer edges, then to the
    lower-index predecessor.
    """
    g = weight.grid
    if np.any(weight.values < 0):
        raise ValueError("geodesic weights must be non-negative")
    source = int(source)
    if not 0 <= source < g.size:
        raise IndexError(f"source {source} outside grid of {g.size} nodes")
    dist, pred, hops, order = kernels.dijkstra(weight.flat(), g.nx, g.ny, g.hx, g.hy, source)
    return GeodesicResult(source, dist, pred, hops, order)


def select_sources(candidates: np.ndarray, sampling: PairSampling, rng: np.random.Generator | None = None):
    """Source nodes and their inverse-inclusion-probability weights."""
    candidates = np.asarray(candidates, dtype=np.int64)
    if sampling.mode == "all" or candidates.size <= sampling.max_sources:
        return candidates, np.ones(candidates.size)
    if rng is None:
        rng = sampling.rng()
    strata = np.array_split(candidates, sampling.max_sources)
    picks = np.array([s[rng.integers(s.size)] for s in strata], dtype=np.int64)
    return picks, np.array([float(s.size) for s in strata])


def _phase_values(u: ScalarField, phase: str) -> np.ndarray:
    if phase == "one":
        return u.flat()
    if phase == "zero":
        return 1.0 - u.flat()
    raise ValueError(f"phase must be one of {PHASES}, got {phase!r}")


def _single_zero_cost_cluster(v: np.ndarray, alpha: float, grid) -> bool:
    """True when all nodes with beta > 0 lie in one 8-connected patch of psi = 0."""
    t = (v - 1.0 + alpha).reshape(grid.shape)
    labels, _ = ndimage.label(t >= 0, structure=np.ones((3, 3), dtype=bool))
    return np.unique(labels[t > 0]).size <= 1


def connectedness_linearization(u: ScalarField, phase: str, p: ModelParams, sampling: PairSampling,
                                rng: np.random.Generator | None = None, want_grad: bool = True):
    """Value of the penalty and the factorised form of its gradient.

    beta' and psi' are linear in u on their supports, so the L2 gradient
    density is exactly ``coef * (u - knee)`` with ``coef >= 0`` collecting the
    pair sums and path loads, and ``knee = 1 - alpha`` (phase one) or
    ``alpha`` (phase zero). Returns ``(value, coef, knee)``.
    """
    grid = u.grid
    alpha, c1 = p.alpha_eff, p.c1
    v = _phase_values(u, phase)
    beta = beta_eps(v, alpha, c1)
    psi = psi_eps(v, alpha)
    area = grid.cell_area
    knee = 1.0 - alpha if phase == "one" else alpha

    if _single_zero_cost_cluster(v, alpha, grid):
        # every detected pair is joined at zero cost: C and its gradient vanish
        return 0.0, (ScalarField.constant(grid, 0.0) if want_grad else None), knee

    candidates = np.flatnonzero(beta > 0)
    sources, weights = select_sources(candidates, sampling, rng)

    value = 0.0
    pair = np.zeros(grid.size) if want_grad else None
    path = np.zeros(grid.size) if want_grad else None
    for x, wx in zip(sources.tolist(), weights.tolist()):
        dist, pred, _, order = kernels.dijkstra(psi, grid.nx, grid.ny, grid.hx, grid.hy, x)
        bx = wx * beta[x]
        bd = float(np.dot(beta, dist))
        value += bx * bd
        if want_grad:
            # beta'(u_x) sum_y beta_y d(x, y) at the source, beta_x beta'(u_y) d(x, y) at every y
            pair[x] += wx * bd
            pair += bx * dist
            path += bx * kernels.tree_edge_loads(pred, order, beta, grid.nx, grid.hx, grid.hy)
    value = float(value) * area * area
    if not want_grad:
        return value, None, knee
    t = v - 1.0 + alpha
    coef = np.where(t > 0, c1 * pair, 0.0) + np.where(t < 0, path, 0.0)
    return value, ScalarField(grid, coef * area), knee


def connectedness(u: ScalarField, phase: str, p: ModelParams, sampling: PairSampling,
                  rng: np.random.Generator | None = None, want_grad: bool = True):
    """Value of the penalty and (optionally) its L2 gradient density ``g``.

    ``g`` satisfies ``dC = integrate(g * du)``: each source contributes the
    chain-rule terms through beta at both pair ends and the path terms
    through psi along its shortest-path tree.
    """
    value, coef, knee = connectedness_linearization(u, phase, p, sampling, rng, want_grad)
    if not want_grad:
        return value, None
    return value, coef * (u.values - knee)


def connectedness_value(u: ScalarField, phase: str, p: ModelParams, sampling: PairSampling,
                        rng: np.random.Generator | None = None) -> float:
    return connectedness(u, phase, p, sampling, rng, want_grad=False)[0]


def connectedness_gradient(u: ScalarField, phase: str, p: ModelParams, sampling: PairSampling,
                           rng: np.random.Generator | None = None) -> ScalarField:
    return connectedness(u, phase, p, sampling, rng)[1]

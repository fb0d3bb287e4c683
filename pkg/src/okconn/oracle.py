"""Sharp-interface energy: connected perimeter plus logarithmic self-interaction.

    F(E) = P(E) + 2 St(E) + lam * int_E int_E log(1 / |x - y|) dx dy

evaluated exactly or by quadrature for parametric shapes, together with the
closed-form large-lam bounds on the minimal energy at area pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft
from skimage.measure import points_in_poly

from .steiner import steiner_tree


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be > 0")

    @property
    def area(self):
        return math.pi * self.radius**2

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cx + r, cy - r, cy + r)

    def contains(self, X, Y):
        return (X - self.center[0]) ** 2 + (Y - self.center[1]) ** 2 < self.radius**2


@dataclass(frozen=True)
class Rectangle:
    corner: tuple[float, float]
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("rectangle sides must be > 0")

    @property
    def area(self):
        return self.width * self.height

    def bbox(self):
        x, y = self.corner
        return (x, x + self.width, y, y + self.height)

    def contains(self, X, Y):
        x0, x1, y0, y1 = self.bbox()
        return (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)


@dataclass(frozen=True)
class UnionOfDisks:
    disks: tuple[Disk, ...]

    def __post_init__(self):
        if not self.disks:
            raise ValueError("union of disks needs at least one disk")
        for i, a in enumerate(self.disks):
            for b in self.disks[i + 1:]:
                gap = math.dist(a.center, b.center) - a.radius - b.radius
                if gap < 0:
                    raise ValueError(f"overlapping disks {a} and {b} are not supported")

    @property
    def area(self):
        return sum(d.area for d in self.disks)

    def bbox(self):
        boxes = np.array([d.bbox() for d in self.disks])
        return (boxes[:, 0].min(), boxes[:, 1].max(), boxes[:, 2].min(), boxes[:, 3].max())

    def contains(self, X, Y):
        out = np.zeros(np.broadcast(X, Y).shape, dtype=bool)
        for d in self.disks:
            out |= d.contains(X, Y)
        return out


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise ValueError("polygon needs at least three 2-D vertices")
        if _self_intersecting(v):
            raise ValueError("polygon must be simple")

    @property
    def area(self):
        v = np.asarray(self.vertices, dtype=float)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def bbox(self):
        v = np.asarray(self.vertices, dtype=float)
        return (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def contains(self, X, Y):
        pts = np.column_stack([np.ravel(X), np.ravel(Y)])
        inside = points_in_poly(pts, np.asarray(self.vertices, dtype=float))
        return inside.reshape(np.shape(X))


def _self_intersecting(v: np.ndarray) -> bool:
    n = len(v)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for i in range(n):
        p1, p2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            q1, q2 = v[j], v[(j + 1) % n]
            d1, d2 = cross(q1, q2, p1), cross(q1, q2, p2)
            d3, d4 = cross(p1, p2, q1), cross(p1, p2, q2)
            if d1 * d2 < 0 and d3 * d4 < 0:
                return True
    return False


def rectangle_competitor(r: float) -> Rectangle:
    """The area-pi rectangle [0, r] x [0, pi / r]."""
    return Rectangle((0.0, 0.0), r, math.pi / r)


def perimeter(shape) -> float:
    if isinstance(shape, Disk):
        return 2 * math.pi * shape.radius
    if isinstance(shape, Rectangle):
        return 2 * (shape.width + shape.height)
    if isinstance(shape, UnionOfDisks):
        return sum(perimeter(d) for d in shape.disks)
    if isinstance(shape, Polygon):
        v = np.asarray(shape.vertices, dtype=float)
        return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())
    raise TypeError(f"unsupported shape {shape!r}")


def connector_length(shape) -> float:
    """Length of the shortest network joining the components of ``shape``.

    For a union of disks this is the Steiner tree of the centres with every
    edge shortened by the radius of each disk it ends on.
    """
    if not isinstance(shape, UnionOfDisks) or len(shape.disks) == 1:
        return 0.0
    centers = np.array([d.center for d in shape.disks], dtype=float)
    radii = np.array([d.radius for d in shape.disks])
    n = len(centers)
    _, steiner_xy, edges = steiner_tree(centers)
    nodes = np.vstack([centers, steiner_xy]) if len(steiner_xy) else centers
    # Steiner points that collapsed onto a centre belong to that disk.
    owner = list(range(len(nodes)))
    scale = float(np.ptp(centers, axis=0).max()) or 1.0
    for s in range(n, len(nodes)):
        d = np.linalg.norm(centers - nodes[s], axis=1)
        if d.min() < 1e-9 * scale:
            owner[s] = int(d.argmin())
    total = 0.0
    for a, b in edges:
        oa, ob = owner[a], owner[b]
        if oa == ob:
            continue
        ell = float(np.linalg.norm(nodes[oa] - nodes[ob]))
        if oa < n:
            ell -= radii[oa]
        if ob < n:
            ell -= radii[ob]
        total += max(ell, 0.0)
    return total


def connected_perimeter(shape) -> float:
    return float(perimeter(shape) + 2.0 * connector_length(shape))


def _coverage(shape, x0, y0, dx, dy, n, sub):
    """Area fraction of each of the n x n cells covered by ``shape`` (sub x sub samples)."""
    offs = (np.arange(sub) + 0.5) / sub
    xs = x0 + (np.arange(n)[:, None] + offs[None, :]).ravel() * dx
    ys = y0 + (np.arange(n)[:, None] + offs[None, :]).ravel() * dy
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    inside = shape.contains(X, Y).astype(np.float64)
    return inside.reshape(n, sub, n, sub).mean(axis=(1, 3))


def _self_cell(dx, dy):
    """Mean of log(1/|x - y|) over pairs in a cell, via the equal-area disk."""
    rho = math.sqrt(dx * dy / math.pi)
    return 0.25 - math.log(rho)


def _interaction_sum(w, dx, dy):
    ny, nx = w.shape
    shape = (fft.next_fast_len(2 * ny - 1), fft.next_fast_len(2 * nx - 1))
    W = fft.rfft2(w, shape)
    corr = fft.irfft2(W * np.conj(W), shape)
    ox = np.arange(shape[1])
    oy = np.arange(shape[0])
    ox = np.where(ox < shape[1] // 2 + 1, ox, ox - shape[1])
    oy = np.where(oy < shape[0] // 2 + 1, oy, oy - shape[0])
    OX, OY = np.meshgrid(ox * dx, oy * dy, indexing="xy")
    r = np.hypot(OX, OY)
    r[0, 0] = 1.0
    kernel = -np.log(r)
    kernel[0, 0] = _self_cell(dx, dy)
    area = dx * dy
    return float((corr * kernel).sum()) * area * area


def log_interaction_raw(shape, n_quad: int, supersample: int = 8) -> float:
    x0, x1, y0, y1 = shape.bbox()
    dx, dy = (x1 - x0) / n_quad, (y1 - y0) / n_quad
    w = _coverage(shape, x0, y0, dx, dy, n_quad, supersample)
    return _interaction_sum(w, dx, dy)


def log_interaction(shape, n_quad: int = 256, supersample: int = 8) -> float:
    """Double integral of log(1/|x-y|) over ``shape`` x ``shape``.

    Midpoint quadrature on an n_quad x n_quad tiling of the bounding box with
    cell coverage fractions as weights, equal-area-disk self-cell term, and a
    second-order Richardson step over n_quad and 2 n_quad.
    """
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    coarse = log_interaction_raw(shape, n_quad, supersample)
    fine = log_interaction_raw(shape, 2 * n_quad, supersample)
    return (4.0 * fine - coarse) / 3.0


def disk_log_interaction(radius: float) -> float:
    """Closed form pi^2 R^4 (1/4 - log R)."""
    return math.pi**2 * radius**4 * (0.25 - math.log(radius))


def sharp_energy(shape, lam: float, n_quad: int = 256) -> float:
    if lam == 0:
        return connected_perimeter(shape)
    if isinstance(shape, Disk) and n_quad is None:
        return connected_perimeter(shape) + lam * disk_log_interaction(shape.radius)
    return connected_perimeter(shape) + lam * log_interaction(shape, n_quad)


@dataclass(frozen=True)
class BoundReport:
    lam: float
    lower: float
    upper: float
    leading: float


def scaling_bounds(lam: float) -> BoundReport:
    """Lower/upper bounds on the minimal area-pi energy at large ``lam``."""
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    a = math.pi**2 * lam
    lower = a * (1.0 - math.log(a / 2.0))
    upper = lower + 2.0 * a + 2.0 * math.pi / lam
    return BoundReport(lam, lower, upper, -a * math.log(a / 2.0))


def rectangle_energy(lam: float, n_quad: int = 256) -> float:
    """Energy of the competitor rectangle with r = pi^2 lam."""
    return sharp_energy(rectangle_competitor(math.pi**2 * lam), lam, n_quad)

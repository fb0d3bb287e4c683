"""Shape diagnostics of the superlevel set {u > threshold} of a phase field."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, signal
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import ConvexHull, QhullError
from skimage import measure

from .grid import ScalarField

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Diagnostics:
    """Summary of one superlevel set. NaN marks fields that are undefined.

    ``deficit`` is only defined for a single component; it is the
    isoperimetric deficit of the set after rescaling to area pi.
    """

    threshold: float
    components: int
    area: float
    perimeter: float
    diameter: float
    deficit: float

    @property
    def empty(self) -> bool:
        return self.components == 0

    def row(self) -> dict:
        return {
            "threshold": self.threshold, "components": self.components, "area": self.area,
            "perimeter": self.perimeter, "diameter": self.diameter, "deficit": self.deficit,
        }


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")


def superlevel(u: ScalarField, threshold: float = 0.5) -> np.ndarray:
    _check_threshold(threshold)
    return u.values > threshold


def count_components(u: ScalarField, threshold: float = 0.5) -> int:
    """Number of 8-connected components of {u > threshold}."""
    return int(ndimage.label(superlevel(u, threshold), structure=_EIGHT)[1])


def diameter(u: ScalarField, threshold: float = 0.5) -> float:
    """Largest distance between two cell centres of the superlevel set."""
    mask = superlevel(u, threshold)
    if not mask.any():
        return math.nan
    X, Y = u.grid.mesh()
    pts = np.column_stack([X[mask], Y[mask]])
    if len(pts) > 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:  # collinear cells
            pass
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def contour_geometry(u: ScalarField, threshold: float = 0.5) -> tuple[float, float]:
    """Length and enclosed area of the ``threshold`` level curves.

    Contours are traced by marching squares on the cell-centre samples; the
    field is padded with a value below the threshold so every curve closes.
    """
    g = u.grid
    low = min(float(u.values.min()), threshold) - 1.0
    padded = np.pad(u.values, 1, constant_values=low)
    length = 0.0
    area = 0.0
    for c in measure.find_contours(padded, threshold):
        y = (c[:, 0] - 1) * g.hy
        x = (c[:, 1] - 1) * g.hx
        length += float(np.hypot(np.diff(x), np.diff(y)).sum())
        # find_contours keeps high values on a fixed side, so the signed
        # shoelace area is positive for outer curves and negative for holes
        area += 0.5 * float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]))
    return length, abs(area)


def deficit(u: ScalarField, threshold: float = 0.5) -> float:
    """|dE| / (2 sqrt(pi |E|)) - 1, i.e. the deficit of E rescaled to area pi."""
    length, area = contour_geometry(u, threshold)
    if area <= 0:
        return math.nan
    return length / (2.0 * math.sqrt(math.pi * area)) - 1.0


def concentration(u: ScalarField, radius: float, threshold: float = 0.5) -> float:
    """Max over grid points x of the superlevel area inside the ball B_radius(x)."""
    if not radius > 0:
        raise ValueError("radius must be > 0")
    g = u.grid
    mask = superlevel(u, threshold).astype(np.float64)
    kx = int(math.floor(radius / g.hx))
    ky = int(math.floor(radius / g.hy))
    ox = np.arange(-kx, kx + 1) * g.hx
    oy = np.arange(-ky, ky + 1) * g.hy
    ball = (ox[None, :] ** 2 + oy[:, None] ** 2 <= radius * radius).astype(np.float64)
    local = signal.fftconvolve(mask, ball, mode="same")
    return float(np.rint(local).max()) * g.cell_area


def disk_symmetric_difference(u: ScalarField, threshold: float = 0.5, center=None, upsample: int = 8) -> float:
    """Area of E (symmetric difference) D, with D the disk of area |E|.

    E is resolved on a grid ``upsample`` times finer than ``u`` by bilinear
    interpolation. D is centred at ``center`` or, by default, the centroid of E.
    """
    g = u.grid
    x, y = g.x(), g.y()
    interp = RegularGridInterpolator((y, x), u.values, bounds_error=False, fill_value=None)
    nx, ny = g.nx * upsample, g.ny * upsample
    fx = g.x_min + (np.arange(nx) + 0.5) * (g.hx / upsample)
    fy = g.y_min + (np.arange(ny) + 0.5) * (g.hy / upsample)
    FX, FY = np.meshgrid(fx, fy, indexing="xy")
    inside = interp(np.column_stack([FY.ravel(), FX.ravel()])).reshape(ny, nx) > threshold
    da = g.cell_area / upsample**2
    area = inside.sum() * da
    if area == 0:
        return math.nan
    if center is None:
        center = (FX[inside].mean(), FY[inside].mean())
    radius = math.sqrt(area / math.pi)
    disk = (FX - center[0]) ** 2 + (FY - center[1]) ** 2 < radius * radius
    return float(np.logical_xor(inside, disk).sum() * da)


def diagnostics(u: ScalarField, threshold: float = 0.5) -> Diagnostics:
    n = count_components(u, threshold)
    if n == 0:
        return Diagnostics(threshold, 0, 0.0, math.nan, math.nan, math.nan)
    length, area = contour_geometry(u, threshold)
    dfc = length / (2.0 * math.sqrt(math.pi * area)) - 1.0 if n == 1 and area > 0 else math.nan
    return Diagnostics(threshold, n, area, length, diameter(u, threshold), dfc)


__all__ = [
    "Diagnostics", "concentration", "contour_geometry", "count_components", "deficit",
    "diagnostics", "diameter", "disk_symmetric_difference", "superlevel",
]

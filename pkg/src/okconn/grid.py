"""Uniform cell-centred grids, scalar fields and the Neumann Laplacian."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape ``(ny, nx)``; flattening it is the row-major node order."""
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def extents(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.hx

    def y(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.hy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates as two ``(ny, nx)`` arrays."""
        return np.meshgrid(self.x(), self.y(), indexing="xy")

    def node_xy(self, k: int) -> tuple[float, float]:
        i, j = k % self.nx, k // self.nx
        return (self.x_min + (i + 0.5) * self.hx, self.y_min + (j + 0.5) * self.hy)


def create_grid(nx: int, ny: int, extents) -> Grid2D:
    """Validated grid over ``extents = (x_min, x_max, y_min, y_max)``."""
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise ValueError(f"grid dimensions must be positive, got {nx}x{ny}")
    x_min, x_max, y_min, y_max = (float(e) for e in extents)
    if not x_max > x_min:
        raise ValueError(f"inverted x extent [{x_min}, {x_max}]")
    if not y_max > y_min:
        raise ValueError(f"inverted y extent [{y_min}, {y_max}]")
    return Grid2D(nx, ny, x_min, x_max, y_min, y_max)


class ScalarField:
    """Nodal values on a :class:`Grid2D`, stored as a ``(ny, nx)`` array."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid2D, values):
        values = np.asarray(values, dtype=np.float64)
        if values.size != grid.size:
            raise ValueError(f"expected {grid.size} values, got {values.size}")
        if not np.isfinite(values).all():
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values.reshape(grid.shape)

    @classmethod
    def constant(cls, grid: Grid2D, c: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def from_function(cls, grid: Grid2D, f) -> "ScalarField":
        X, Y = grid.mesh()
        return cls(grid, np.broadcast_to(f(X, Y), grid.shape).copy())

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def _wrap(self, other):
        return other.values if isinstance(other, ScalarField) else other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._wrap(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._wrap(other))

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._wrap(other))

    __rmul__ = __mul__
    __radd__ = __add__

    def __rsub__(self, other):
        return ScalarField(self.grid, self._wrap(other) - self.values)

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __repr__(self):
        g = self.grid
        return f"ScalarField({g.nx}x{g.ny}, min={self.values.min():.4g}, max={self.values.max():.4g})"


def integrate(f: ScalarField) -> float:
    """Midpoint rule: sum of values times the cell area."""
    return float(f.values.sum() * f.grid.cell_area)


def mean(f: ScalarField) -> float:
    return float(f.values.mean())


def laplacian_neumann(f: ScalarField) -> ScalarField:
    """5-point Laplacian with reflecting ghost cells (zero normal derivative)."""
    g = f.grid
    v = np.pad(f.values, 1, mode="edge")
    c = v[1:-1, 1:-1]
    lap = (v[1:-1, 2:] + v[1:-1, :-2] - 2.0 * c) / g.hx**2
    lap += (v[2:, 1:-1] + v[:-2, 1:-1] - 2.0 * c) / g.hy**2
    return ScalarField(g, lap)


def _second_difference_1d(n: int, h: float) -> sp.csr_matrix:
    if n == 1:
        return sp.csr_matrix((1, 1))
    main = np.full(n, -2.0)
    main[0] = main[-1] = -1.0
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h**2


def laplacian_matrix(grid: Grid2D) -> sp.csr_matrix:
    """Sparse matrix of :func:`laplacian_neumann` acting on row-major vectors."""
    dxx = _second_difference_1d(grid.nx, grid.hx)
    dyy = _second_difference_1d(grid.ny, grid.hy)
    return (sp.kron(sp.identity(grid.ny), dxx) + sp.kron(dyy, sp.identity(grid.nx))).tocsr()


def write_field(path, f: ScalarField) -> None:
    """Dump ``f`` as ``FIELD nx ny x_min x_max y_min y_max`` plus row-major values."""
    g = f.grid
    with open(path, "w") as fh:
        fh.write(f"FIELD {g.nx} {g.ny} {g.x_min!r} {g.x_max!r} {g.y_min!r} {g.y_max!r}\n")
        flat = f.flat()
        for j in range(g.ny):
            fh.write(" ".join(repr(float(v)) for v in flat[j * g.nx:(j + 1) * g.nx]))
            fh.write("\n")


def read_field(path) -> ScalarField:
    text = Path(path).read_text().split()
    if not text or text[0] != "FIELD":
        raise ValueError(f"{path}: missing FIELD header")
    try:
        nx, ny = int(text[1]), int(text[2])
        extents = [float(t) for t in text[3:7]]
        values = np.array([float(t) for t in text[7:]])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed field dump ({exc})") from None
    grid = create_grid(nx, ny, extents)
    if values.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values, found {values.size}")
    return ScalarField(grid, values)

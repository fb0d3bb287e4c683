"""Initial conditions: smoothed indicator functions of simple sets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, ScalarField, read_field

KINDS = ("polar_cosine", "disk", "field_file")


def interface_profile(signed_distance, eps):
    """Equilibrium 1-D profile of the double well, 1/2 (1 + tanh(d / (2 sqrt(2) eps)))."""
    return 0.5 * (1.0 + np.tanh(signed_distance / (2.0 * math.sqrt(2.0) * eps)))


@dataclass(frozen=True)
class InitialCondition:
    """``polar_cosine`` is the set r < r0 + a cos(k theta) about ``center``."""

    kind: str = "disk"
    r0: float = 0.25
    a: float = 0.0
    k: int = 2
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.25
    path: str = ""
    smoothing: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "disk" and not self.radius > 0:
            raise ValueError("disk radius must be > 0")
        if self.kind == "field_file" and not self.path:
            raise ValueError("field_file initial condition needs a path")

    def realize(self, grid: Grid2D, eps: float) -> ScalarField:
        if self.kind == "field_file":
            f = read_field(self.path)
            if f.grid != grid:
                raise ValueError(f"{self.path}: grid {f.grid} does not match configured grid {grid}")
            return ScalarField(grid, np.clip(f.values, 0.0, 1.0))
        X, Y = grid.mesh()
        dx, dy = X - self.center[0], Y - self.center[1]
        r = np.hypot(dx, dy)
        if self.kind == "disk":
            d = self.radius - r
        else:
            theta = np.arctan2(dy, dx)
            d = self.r0 + self.a * np.cos(self.k * theta) - r
        if self.smoothing:
            return ScalarField(grid, interface_profile(d, eps))
        return ScalarField(grid, (d > 0).astype(float))

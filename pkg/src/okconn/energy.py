"""Ohta-Kawasaki free energy on the grid.

The nonlocal part is the squared H^-1 norm of ``u - m_bar``, evaluated with a
conjugate-gradient solve of the Neumann Poisson problem.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, integrate, laplacian_neumann
from .params import ModelParams


class SolverError(RuntimeError):
    """Iterative solve stopped before reaching its tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


class CompatibilityWarning(UserWarning):
    pass


@dataclass
class EnergyBreakdown:
    interface: float
    well: float
    nonlocal_: float
    c1_term: float = 0.0
    c2_term: float = 0.0
    mass: float = 0.0

    @property
    def total(self) -> float:
        return self.interface + self.well + self.nonlocal_ + self.c1_term + self.c2_term

    def row(self) -> dict:
        return {
            "interface": self.interface,
            "well": self.well,
            "nonlocal": self.nonlocal_,
            "c1": self.c1_term,
            "c2": self.c2_term,
            "total": self.total,
            "mass": self.mass,
        }


def double_well(s):
    return 0.25 * s**2 * (s - 1.0) ** 2


def double_well_prime(s):
    return 0.5 * s * (s - 1.0) * (2.0 * s - 1.0)


def solve_neumann_poisson(rhs: ScalarField, tol: float = 1e-10, max_iter: int | None = None) -> ScalarField:
    """Zero-mean ``phi`` with ``-laplacian_neumann(phi) = rhs``.

    An incompatible (non-zero-mean) right-hand side is projected onto zero
    mean with a :class:`CompatibilityWarning`.
    """
    grid = rhs.grid
    b = rhs.values - rhs.values.mean()
    scale = max(1.0, float(np.abs(rhs.values).max()))
    if abs(rhs.values.mean()) > tol * scale:
        warnings.warn(
            f"Neumann Poisson right-hand side has mean {rhs.values.mean():.3e}; projected to zero mean",
            CompatibilityWarning,
            stacklevel=2,
        )
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return ScalarField.constant(grid, 0.0)
    if max_iter is None:
        max_iter = 20 * (grid.nx + grid.ny) + 200

    def apply(x):
        return -laplacian_neumann(ScalarField(grid, x)).values

    x = np.zeros(grid.shape)
    r = b.copy()
    p = r.copy()
    rr = np.vdot(r, r)
    for _ in range(max_iter):
        ap = apply(p)
        step = rr / np.vdot(p, ap)
        x += step * p
        r -= step * ap
        r -= r.mean()
        rr_new = np.vdot(r, r)
        if np.sqrt(rr_new) <= tol * bnorm:
            break
        p = r + (rr_new / rr) * p
        rr = rr_new
    else:
        raise SolverError("Neumann Poisson CG did not converge", np.sqrt(rr_new) / bnorm)
    x -= x.mean()
    return ScalarField(grid, x)


def hminus1_norm_sq(v: ScalarField, tol: float = 1e-10) -> float:
    """Squared H^-1 norm, i.e. the integral of ``(-Delta_N)^-1 v`` times ``v``."""
    phi = solve_neumann_poisson(v, tol)
    return integrate(phi * v)


def interface_energy(u: ScalarField, p: ModelParams) -> float:
    g = u.grid
    dx = np.diff(u.values, axis=1) / g.hx
    dy = np.diff(u.values, axis=0) / g.hy
    grad_sq = float((dx**2).sum() + (dy**2).sum()) * g.cell_area
    return 0.5 * p.eps * grad_sq / p.c0


def well_energy(u: ScalarField, p: ModelParams) -> float:
    return float(double_well(u.values).sum()) * u.grid.cell_area / (p.c0 * p.eps)


def ok_energy(u: ScalarField, p: ModelParams, tol: float = 1e-10) -> EnergyBreakdown:
    """Interface, double-well and nonlocal parts of the free energy.

    The gradient is taken on faces, so the interface term is the exact
    summation-by-parts partner of :func:`laplacian_neumann`.
    """
    nonlocal_ = 0.0
    if p.lam > 0:
        nonlocal_ = 0.5 * p.lam * hminus1_norm_sq(u - p.m_bar, tol)
    return EnergyBreakdown(
        interface=interface_energy(u, p),
        well=well_energy(u, p),
        nonlocal_=nonlocal_,
        mass=integrate(u),
    )

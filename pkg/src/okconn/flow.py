"""Semi-implicit H^-1 gradient flow of the penalised Ohta-Kawasaki energy.

Each step solves, for (u, w),

    (u - u_prev) / tau = L w - lam (u - m_bar)
    w = -(eps / c0) L u + a(u_prev) u / (c0 eps) + f

with L the Neumann Laplacian and ``a`` the frozen double-well coefficient.
The connectedness forcing ``f`` has its pairs, paths and weights taken at
u_prev. With ``penalty="linearized"`` (default) its local factor, which is
linear in u, is taken at the new level: f = b(u_prev) (u - knee) with b >= 0,
in the same way as the double well. ``penalty="explicit"`` uses f(u_prev).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .connect import PairSampling, connectedness_linearization
from .energy import SolverError, ok_energy
from .grid import Grid2D, ScalarField, integrate, laplacian_matrix, write_field
from .params import ModelParams

log = logging.getLogger(__name__)

CSV_COLUMNS = ("step", "time", "interface", "well", "nonlocal", "c1", "c2", "total", "mass")


class FlowError(RuntimeError):
    pass


@dataclass
class FlowState:
    u: ScalarField
    w: ScalarField
    params: ModelParams
    step: int = 0
    time: float = 0.0


@dataclass(frozen=True)
class StopRule:
    max_steps: int = 200_000
    du_tol: float = 1e-6

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if not self.du_tol > 0:
            raise ValueError("du_tol must be > 0")


@dataclass
class FlowResult:
    state: FlowState
    rows: list = field(default_factory=list)
    stop_reason: str = ""

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in self.rows:
                writer.writerow([int(row["step"])] + [repr(float(row[c])) for c in CSV_COLUMNS[1:]])


def linearized_well_coefficient(u_prev):
    """Coefficient ``a`` with W'(u) ~ a(u_prev) * u."""
    return 0.5 * ((u_prev - 1.0) ** 2 + u_prev * (u_prev - 1.0))


@dataclass
class Forcing:
    """Connectedness forcing ``diag * u - offset`` plus the raw penalty values."""

    diag: np.ndarray
    offset: np.ndarray
    values: tuple[float, float] = (0.0, 0.0)

    def at(self, u: np.ndarray) -> np.ndarray:
        return self.diag * u - self.offset

    def explicit(self, u: np.ndarray) -> "Forcing":
        return Forcing(np.zeros_like(self.diag), -self.at(u), self.values)


def connectedness_forcing(u: ScalarField, p: ModelParams, sampling: PairSampling,
                          rng: np.random.Generator | None = None) -> Forcing:
    """Scaled penalty forcing at ``u`` (zero when both weights vanish)."""
    diag = np.zeros(u.grid.size)
    offset = np.zeros(u.grid.size)
    values = [0.0, 0.0]
    for k, (zeta, phase) in enumerate(((p.zeta1, "one"), (p.zeta2, "zero"))):
        if zeta == 0.0:
            continue
        value, coef, knee = connectedness_linearization(u, phase, p, sampling, rng)
        values[k] = value
        b = zeta * p.penalty_scale * coef.flat()
        diag += b
        offset += b * knee
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offset))):
        raise FlowError("non-finite connectedness forcing")
    return Forcing(diag, offset, tuple(values))


class Stepper:
    """Assembles and solves the coupled (w, u) system for one grid.

    The system is written in the symmetric form

        [ -L / s   I  ] [w]   [ (u_prev / tau + lam m_bar) / s ]
        [   I      K  ] [u] = [ -offset                        ]

    with s = 1 / tau + lam and K = (eps / c0) L - diag(a) / (c0 eps) - diag(b),
    where the forcing is b * u - offset.
    """

    def __init__(self, grid: Grid2D, p: ModelParams, rtol: float = 1e-9):
        self.grid = grid
        self.p = p
        self.rtol = rtol
        n = grid.size
        self.L = laplacian_matrix(grid)
        self.sigma = 1.0 / p.tau + p.lam
        self.eye = sp.identity(n, format="csr")
        self._top = sp.hstack([-self.L / self.sigma, self.eye])
        self._kl = (p.eps / p.c0) * self.L

    def matrix(self, u_prev: np.ndarray, diag: np.ndarray) -> sp.csc_matrix:
        p = self.p
        a = linearized_well_coefficient(u_prev)
        K = self._kl - sp.diags(a / (p.c0 * p.eps) + diag)
        return sp.vstack([self._top, sp.hstack([self.eye, K])]).tocsc()

    def solve(self, u_prev: np.ndarray, forcing: Forcing):
        p = self.p
        A = self.matrix(u_prev, forcing.diag)
        b = np.concatenate([(u_prev / p.tau + p.lam * p.m_bar) / self.sigma, -forcing.offset])
        try:
            lu = spla.splu(A, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SolverError(f"coupled flow system: {exc}", float("inf")) from None
        x = lu.solve(b)
        bnorm = max(np.linalg.norm(b), np.finfo(float).tiny)
        res = np.linalg.norm(A @ x - b) / bnorm
        if res > self.rtol:
            x += lu.solve(b - A @ x)
            res = np.linalg.norm(A @ x - b) / bnorm
            if not res <= self.rtol:
                raise SolverError("coupled flow system", res)
        n = self.grid.size
        return x[n:], x[:n]


def step(state: FlowState, sampling: PairSampling, rng: np.random.Generator | None = None,
         stepper: Stepper | None = None, forcing: Forcing | None = None,
         penalty: str = "linearized") -> FlowState:
    """Advance by one time step. ``forcing`` may carry a precomputed penalty term."""
    p = state.params
    if stepper is None:
        stepper = Stepper(state.u.grid, p)
    if forcing is None:
        forcing = connectedness_forcing(state.u, p, sampling, rng)
    if penalty == "explicit":
        forcing = forcing.explicit(state.u.flat())
    elif penalty != "linearized":
        raise ValueError(f"unknown penalty treatment {penalty!r}")
    u_new, w_new = stepper.solve(state.u.flat(), forcing)
    if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(w_new))):
        raise FlowError(f"non-finite values at step {state.step + 1}")
    g = state.u.grid
    return FlowState(ScalarField(g, u_new), ScalarField(g, w_new), p, state.step + 1, state.time + p.tau)


def energy_row(state: FlowState, c_values) -> dict:
    p = state.params
    e = ok_energy(state.u, p)
    e.c1_term = p.zeta1 * p.penalty_scale * c_values[0]
    e.c2_term = p.zeta2 * p.penalty_scale * c_values[1]
    return {"step": state.step, "time": state.time, **e.row()}


def run(initial: ScalarField, p: ModelParams, stop: StopRule, sampling: PairSampling,
        log_every: int = 100, snapshot_every: int = 0, output_dir=None, callback=None,
        penalty: str = "linearized") -> FlowResult:
    """Iterate :func:`step` until the stop rule fires.

    ``m_bar`` is reset to the mean of ``initial``. An energy row is recorded
    every ``log_every`` steps and for the final state; with ``output_dir`` and
    ``snapshot_every > 0`` fields are dumped as ``u_<step>.dat``.
    """
    p = replace(p, m_bar=float(initial.values.mean()))
    rng = sampling.rng()
    stepper = Stepper(initial.grid, p)
    state = FlowState(initial.copy(), ScalarField.constant(initial.grid, 0.0), p)
    out = Path(output_dir) if output_dir is not None else None
    result = FlowResult(state)

    def snapshot(s):
        if out is not None and snapshot_every > 0 and s.step % snapshot_every == 0:
            write_field(out / f"u_{s.step}.dat", s.u)

    snapshot(state)
    reason = "max_steps"
    while state.step < stop.max_steps:
        forcing = connectedness_forcing(state.u, p, sampling, rng)
        if log_every > 0 and state.step % log_every == 0:
            result.rows.append(energy_row(state, forcing.values))
            log.info("step %d total %.6g", state.step, result.rows[-1]["total"])
        new = step(state, sampling, stepper=stepper, forcing=forcing, penalty=penalty)
        rate = float(np.abs(new.u.values - state.u.values).max()) / p.tau
        state = new
        snapshot(state)
        if callback is not None:
            callback(state)
        if rate < stop.du_tol:
            reason = "du_tol"
            break
    if not result.rows or result.rows[-1]["step"] != state.step:
        final = connectedness_forcing(state.u, p, sampling, sampling.rng())
        result.rows.append(energy_row(state, final.values))
    result.state = state
    result.stop_reason = reason
    return result


def mass_drift(result: FlowResult, initial: ScalarField) -> float:
    return abs(integrate(result.state.u) - integrate(initial))


__all__ = [
    "CSV_COLUMNS", "FlowError", "FlowResult", "FlowState", "Forcing", "StopRule", "Stepper",
    "connectedness_forcing", "linearized_well_coefficient", "run", "step", "mass_drift",
]

"""Phase-field Ohta-Kawasaki flow with geodesic connectedness penalties.

The flow side lives in :mod:`okconn.flow`; the sharp-interface reference
values (connected perimeter, logarithmic interaction, Steiner trees and the
large-lambda bounds) live in :mod:`okconn.oracle` and :mod:`okconn.steiner`.
"""
from .connect import PairSampling, connectedness, connectedness_gradient, connectedness_value, geodesic_from
from .energy import EnergyBreakdown, hminus1_norm_sq, ok_energy, solve_neumann_poisson
from .flow import FlowState, StopRule, run, step
from .grid import Grid2D, ScalarField, create_grid, integrate, laplacian_neumann, read_field, write_field
from .kernels import BACKEND
from .oracle import (connected_perimeter, log_interaction, perimeter, scaling_bounds, sharp_energy)
from .params import C0, ModelParams
from .steiner import steiner_length

__version__ = "0.1.0"

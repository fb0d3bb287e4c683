import math
import warnings

import numpy as np
import pytest

from okconn.energy import (CompatibilityWarning, SolverError, double_well, double_well_prime,
                           hminus1_norm_sq, ok_energy, solve_neumann_poisson)
from okconn.grid import ScalarField, create_grid, integrate, laplacian_neumann
from okconn.initial import interface_profile
from okconn.params import C0, ModelParams


def test_c0_and_c1():
    assert C0 == 1 / (6 * math.sqrt(2))
    p = ModelParams(eps=0.01, alpha=0.3)
    s = np.linspace(0.7, 1.0, 20001)
    beta = 0.5 * p.c1 * (s - 0.7) ** 2
    assert np.trapezoid(beta, s) == pytest.approx(1.0, rel=1e-8)


def test_alpha_defaults_and_validation():
    assert ModelParams(eps=1e-4).alpha_eff == pytest.approx(0.1)
    for bad in ({"alpha": 0.6}, {"alpha": 0.0}, {"eps": -1.0}, {"tau": 0.0}, {"zeta1": -1.0},
                {"s_exponent": 0.5}, {"lam": -2.0}):
        kw = {"eps": 0.01, **bad}
        with pytest.raises(ValueError):
            ModelParams(**kw)


def test_double_well_values():
    assert double_well(0.0) == 0.0 and double_well(1.0) == 0.0
    assert double_well(0.5) == 1 / 64
    assert double_well_prime(0.5) == 0.0
    assert double_well_prime(0.25) == pytest.approx(3 / 64, abs=1e-17)
    s = np.linspace(-0.5, 1.5, 9)
    h = 1e-6
    fd = (double_well(s + h) - double_well(s - h)) / (2 * h)
    assert np.allclose(fd, double_well_prime(s), atol=1e-9)


def test_poisson_zero_and_incompatible():
    g = create_grid(16, 16, (0, 1, 0, 1))
    assert np.all(solve_neumann_poisson(ScalarField.constant(g, 0.0)).values == 0)
    with pytest.warns(CompatibilityWarning):
        phi = solve_neumann_poisson(ScalarField.constant(g, 1.0))
    assert np.all(phi.values == 0)


def test_poisson_residual_and_mean():
    rng = np.random.default_rng(0)
    g = create_grid(24, 17, (0, 1.3, 0, 1))
    rhs = ScalarField(g, rng.standard_normal(g.shape))
    rhs = rhs - rhs.values.mean()
    phi = solve_neumann_poisson(rhs, tol=1e-10)
    res = laplacian_neumann(phi).values + rhs.values
    assert np.linalg.norm(res) <= 1e-9 * np.linalg.norm(rhs.values)
    assert abs(integrate(phi)) < 1e-13


def test_poisson_iteration_cap_raises():
    rng = np.random.default_rng(1)
    g = create_grid(32, 32, (0, 1, 0, 1))
    rhs = ScalarField(g, rng.standard_normal(g.shape))
    with pytest.raises(SolverError) as info:
        solve_neumann_poisson(rhs - rhs.values.mean(), max_iter=3)
    assert info.value.residual > 0


def test_poisson_cosine_converges():
    errs = []
    for n in (16, 32, 64):
        g = create_grid(n, n, (0, 1, 0, 1))
        rhs = ScalarField.from_function(g, lambda x, y: np.cos(np.pi * x) + 0 * y)
        phi = solve_neumann_poisson(rhs)
        errs.append(np.abs(phi.values - rhs.values / np.pi**2).max())
    assert errs[2] < errs[1] < errs[0]
    assert math.log2(errs[1] / errs[2]) > 1.9


def test_hminus1_properties():
    rng = np.random.default_rng(2)
    g = create_grid(20, 20, (0, 1, 0, 1))
    for _ in range(5):
        v = ScalarField(g, rng.standard_normal(g.shape))
        v = v - v.values.mean()
        w = ScalarField(g, rng.standard_normal(g.shape))
        w = w - w.values.mean()
        n1 = hminus1_norm_sq(v)
        assert n1 >= -1e-10
        assert hminus1_norm_sq(2.0 * v) == pytest.approx(4 * n1, rel=1e-8)
        a = integrate(solve_neumann_poisson(v) * w)
        b = integrate(solve_neumann_poisson(w) * v)
        assert a == pytest.approx(b, rel=1e-8, abs=1e-12)
    assert hminus1_norm_sq(ScalarField.constant(g, 0.0)) == 0.0
    g64 = create_grid(64, 64, (0, 1, 0, 1))
    c = ScalarField.from_function(g64, lambda x, y: np.cos(np.pi * x) + 0 * y)
    assert hminus1_norm_sq(c) == pytest.approx(1 / (2 * np.pi**2), rel=0.01)


def test_constant_state_energy():
    g = create_grid(10, 10, (0, 2, 0, 1))
    p = ModelParams(eps=0.05, lam=7.0, m_bar=0.3)
    e = ok_energy(ScalarField.constant(g, 0.3), p)
    assert e.interface == 0.0 and e.nonlocal_ == 0.0
    assert e.well == pytest.approx(double_well(0.3) * g.area / (C0 * p.eps), rel=1e-14)
    e0 = ok_energy(ScalarField.constant(g, 0.0), p.with_(m_bar=0.0))
    assert e0.total == 0.0 and e0.mass == 0.0


def test_breakdown_total_is_sum():
    rng = np.random.default_rng(3)
    g = create_grid(12, 12, (0, 1, 0, 1))
    u = ScalarField(g, rng.random(g.shape))
    e = ok_energy(u, ModelParams(eps=0.05, lam=3.0, m_bar=float(u.values.mean())))
    e.c1_term, e.c2_term = 0.25, 0.5
    assert e.total == pytest.approx(e.interface + e.well + e.nonlocal_ + 0.75, rel=1e-15)
    row = e.row()
    assert list(row) == ["interface", "well", "nonlocal", "c1", "c2", "total", "mass"]
    assert min(e.interface, e.well, e.nonlocal_) >= 0


def test_flat_interface_costs_its_length():
    # equilibrium profile of W(s) = s^2 (s - 1)^2 / 4 with the c0 normalisation
    eps = 0.02
    g = create_grid(512, 4, (0, 1, 0, 4 / 512))
    X, _ = g.mesh()
    u = ScalarField(g, interface_profile(X - 0.5, eps))
    e = ok_energy(u, ModelParams(eps=eps))
    per_length = (e.interface + e.well) / (g.y_max - g.y_min)
    assert per_length == pytest.approx(1.0, rel=0.05)


def test_energy_translation_invariant_without_nonlocal_term():
    # compactly supported bump moved by whole cells; the Neumann H^-1 term
    # sees the walls, so the shift invariance is a lam = 0 property
    g = create_grid(48, 48, (0, 1, 0, 1))
    X, Y = g.mesh()
    r = np.hypot(X - 0.5, Y - 0.5) / 0.2
    u = ScalarField(g, np.where(r < 1, (1 - r**2) ** 3, 0.0))
    p = ModelParams(eps=0.03)
    moved = ScalarField(g, np.roll(np.roll(u.values, 3, axis=1), -2, axis=0))
    a = ok_energy(u, p).total
    b = ok_energy(moved, p).total
    assert abs(a - b) < 1e-10 * abs(a)


def test_nonlocal_term_uses_stored_mean():
    g = create_grid(16, 16, (0, 1, 0, 1))
    u = ScalarField.from_function(g, lambda x, y: 0.5 + 0.2 * np.cos(np.pi * x) + 0 * y)
    p = ModelParams(eps=0.05, lam=2.0, m_bar=0.5)
    e = ok_energy(u, p)
    assert e.nonlocal_ == pytest.approx(hminus1_norm_sq(u - 0.5), rel=1e-12)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ok_energy(u, p.with_(m_bar=0.4))
    assert any(issubclass(w.category, CompatibilityWarning) for w in caught)

import numpy as np
import pytest

from _oracles import bellman_ford, fd_directional, random_smooth_field
from okconn import kernels
from okconn.connect import (PairSampling, beta_eps, beta_eps_prime, connectedness, connectedness_gradient,
                            connectedness_linearization, connectedness_value, geodesic_from, psi_eps,
                            psi_eps_prime, select_sources)
from okconn.grid import ScalarField, create_grid, integrate
from okconn.params import ModelParams

P = ModelParams(eps=0.01, alpha=0.3)
ALL = PairSampling(mode="all")


def random_weight(rng, nx, ny, ties=False):
    g = create_grid(nx, ny, (0, 1, 0, 1) if ties else (0, rng.uniform(0.5, 2), 0, rng.uniform(0.5, 2)))
    if ties:
        w = rng.integers(0, 3, size=g.shape).astype(float)
    else:
        w = rng.random(g.shape)
    return ScalarField(g, w)


def test_weight_functions():
    a, c1 = P.alpha_eff, P.c1
    s = np.array([0.0, 0.5, 0.7, 0.85, 1.0, 1.2])
    assert np.allclose(beta_eps(s, a, c1), np.where(s > 0.7, 0.5 * c1 * (s - 0.7) ** 2, 0))
    assert np.allclose(psi_eps(s, a), np.where(s < 0.7, 0.5 * (s - 0.7) ** 2, 0))
    h = 1e-7
    for f, fp, args in ((beta_eps, beta_eps_prime, (a, c1)), (psi_eps, psi_eps_prime, (a,))):
        fd = (f(s + h, *args) - f(s - h, *args)) / (2 * h)
        assert np.allclose(fd, fp(s, *args), rtol=1e-5, atol=1e-5)


def test_geodesic_constant_weight_is_octile_distance():
    g = create_grid(6, 5, (0, 6, 0, 5))
    r = geodesic_from(0, ScalarField.constant(g, 1.0))
    j, i = np.divmod(np.arange(g.size), g.nx)
    octile = np.maximum(i, j) + (np.sqrt(2) - 1) * np.minimum(i, j)
    assert np.allclose(r.dist, octile, atol=1e-12)
    assert r.pred[0] == -1 and r.dist[0] == 0
    assert r.path_to(g.size - 1)[0] == 0


@pytest.mark.parametrize("seed", range(40))
def test_geodesic_matches_bellman_ford(seed):
    rng = np.random.default_rng(seed)
    w = random_weight(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)), ties=seed % 2 == 0)
    g = w.grid
    src = int(rng.integers(g.size))
    r = geodesic_from(src, w)
    dist, pred, hops = bellman_ford(w.flat(), g.nx, g.ny, g.hx, g.hy, src)
    assert np.array_equal(r.dist, dist)
    assert np.array_equal(r.pred, pred)
    assert np.array_equal(r.hops, hops)


def test_path_costs_sum_to_distance():
    rng = np.random.default_rng(7)
    w = random_weight(rng, 12, 9)
    g = w.grid
    r = geodesic_from(5, w)
    wf = w.flat()
    for node in rng.integers(0, g.size, 15):
        path = r.path_to(int(node))
        cost = 0.0
        for a, b in zip(path[:-1], path[1:]):
            (xa, ya), (xb, yb) = g.node_xy(a), g.node_xy(b)
            cost += np.hypot(xa - xb, ya - yb) * (wf[a] + wf[b]) / 2
        assert cost == pytest.approx(r.dist[node], rel=1e-12, abs=1e-14)


def test_metric_axioms():
    rng = np.random.default_rng(3)
    w = random_weight(rng, 10, 10)
    n = w.grid.size
    runs = {}
    for _ in range(20):
        x, y, z = (int(v) for v in rng.integers(0, n, 3))
        for k in (x, y, z):
            if k not in runs:
                runs[k] = geodesic_from(k, w).dist
        assert runs[x][x] == 0
        assert runs[x][y] == pytest.approx(runs[y][x], abs=1e-12)
        assert runs[x][z] <= runs[x][y] + runs[y][z] + 1e-12


def test_geodesic_input_checks():
    g = create_grid(3, 3, (0, 1, 0, 1))
    with pytest.raises(ValueError):
        geodesic_from(0, ScalarField.constant(g, -1.0))
    with pytest.raises(IndexError):
        geodesic_from(9, ScalarField.constant(g, 1.0))


def two_blobs(n=20, bridge=0.0):
    g = create_grid(n, n, (0, 1, 0, 1))
    X, Y = g.mesh()
    u = np.exp(-((X - 0.25) ** 2 + (Y - 0.5) ** 2) / 0.01) + np.exp(-((X - 0.75) ** 2 + (Y - 0.5) ** 2) / 0.01)
    u += bridge * np.exp(-((Y - 0.5) ** 2) / 0.002) * (np.abs(X - 0.5) < 0.3)
    return ScalarField(g, np.clip(u, 0, 1))


def test_value_zero_when_connected_and_positive_when_split():
    split = connectedness_value(two_blobs(), "one", P, ALL)
    joined = connectedness_value(two_blobs(bridge=1.0), "one", P, ALL)
    assert split > 0
    assert joined == 0.0
    g = create_grid(8, 8, (0, 1, 0, 1))
    assert connectedness_value(ScalarField.constant(g, 0.2), "one", P, ALL) == 0.0


def test_phase_zero_is_phase_one_of_complement():
    u = two_blobs()
    v = 1.0 - u
    a, ga = connectedness(u, "zero", P, ALL)
    b, gb = connectedness(v, "one", P, ALL)
    assert a == b
    assert np.allclose(ga.values, -gb.values, rtol=0, atol=1e-14 * np.abs(gb.values).max())
    with pytest.raises(ValueError):
        connectedness_value(u, "half", P, ALL)


@pytest.mark.parametrize("phase", ["one", "zero"])
@pytest.mark.parametrize("seed", range(3))
def test_gradient_matches_finite_differences(phase, seed):
    rng = np.random.default_rng(seed)
    g = create_grid(12, 12, (0, 1, 0, 1))
    u = ScalarField(g, random_smooth_field(rng, g))
    if phase == "zero":
        u = 1.0 - u
    grad = connectedness_gradient(u, phase, P, ALL)
    for _ in range(3):
        d = ScalarField(g, rng.standard_normal(g.shape))
        fd = fd_directional(lambda v: connectedness_value(v, phase, P, ALL), u, d, 1e-6)
        assert fd == pytest.approx(integrate(grad * d), rel=1e-5)


def test_linearization_factorises_gradient():
    u = two_blobs(14)
    value, coef, knee = connectedness_linearization(u, "one", P, ALL)
    assert knee == pytest.approx(1 - P.alpha_eff)
    assert np.all(coef.values >= 0)
    v2, grad = connectedness(u, "one", P, ALL)
    assert v2 == value
    assert np.array_equal(grad.values, coef.values * (u.values - knee))


def test_stratified_sampling():
    cand = np.arange(1000)
    picks, weights = select_sources(cand, PairSampling(max_sources=10, rng_seed=4))
    assert len(picks) == 10 and weights.sum() == 1000
    assert np.all(np.diff(picks) > 0)
    again, _ = select_sources(cand, PairSampling(max_sources=10, rng_seed=4))
    assert np.array_equal(picks, again)
    small, w = select_sources(np.arange(5), PairSampling(max_sources=10))
    assert np.array_equal(small, np.arange(5)) and np.all(w == 1)
    with pytest.raises(ValueError):
        PairSampling(max_sources=0)
    with pytest.raises(ValueError):
        PairSampling(mode="some")


def test_stratified_estimate_is_unbiased_on_average():
    u = two_blobs(16)
    exact = connectedness_value(u, "one", P, ALL)
    sampler = PairSampling(max_sources=8)
    rng = np.random.default_rng(0)
    est = [connectedness_value(u, "one", P, sampler, rng) for _ in range(200)]
    mean = np.mean(est)
    sem = np.std(est) / np.sqrt(len(est))
    assert abs(mean - exact) < 4 * sem + 1e-12


def test_kernel_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_connected_shortcut_matches_full_computation(monkeypatch):
    from okconn import connect

    u = two_blobs(20, bridge=1.0)
    assert connect._single_zero_cost_cluster(u.flat(), P.alpha_eff, u.grid)
    fast = connectedness_linearization(u, "one", P, ALL)
    monkeypatch.setattr(connect, "_single_zero_cost_cluster", lambda *a: False)
    full = connectedness_linearization(u, "one", P, ALL)
    assert fast[0] == full[0] == 0.0
    assert np.array_equal(fast[1].values, full[1].values)

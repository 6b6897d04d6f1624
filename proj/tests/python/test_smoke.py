import math

import numpy as np
import pytest

import spdmeans as sm


def random_spd(rng, d, spread=1.0):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return q @ np.diag(np.exp(rng.uniform(-spread, spread, d))) @ q.T


def sqrtm(p):
    w, v = np.linalg.eigh(p)
    return v @ np.diag(np.sqrt(w)) @ v.T


def test_scalar_means():
    value, trace = sm.ahm(4.0, 9.0)
    assert value == pytest.approx(6.0, rel=1e-14)
    assert trace.converged
    assert len(trace) == len(trace.errors) == len(trace.steps)

    value, _ = sm.agm(1.0, 2.0)
    closed = math.pi / 4 * 3 / sm.elliptic_k(1 / 3)
    assert value == pytest.approx(closed, rel=1e-12)
    assert sm.power_mean(1.0, 2.0, 4.0) == pytest.approx(3.0)


def test_complex_ahm():
    z1, z2 = 2 * np.exp(0.4j), 8 * np.exp(-1.0j)
    value, _ = sm.complex_ahm(z1, z2)
    assert value == pytest.approx(4 * np.exp(-0.3j), rel=1e-12)
    with pytest.raises(sm.DomainError):
        sm.complex_ahm(1j, -1j)


def test_geometric_mean_against_closed_form():
    rng = np.random.default_rng(1)
    x, y = random_spd(rng, 3), random_spd(rng, 3)
    g = sm.geometric_mean(x, y)
    xs = sqrtm(x)
    xsi = np.linalg.inv(xs)
    expected = xs @ sqrtm(xsi @ y @ xsi) @ xs
    np.testing.assert_allclose(g, expected, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(g @ np.linalg.solve(x, g), y, rtol=1e-9, atol=1e-10)

    value, trace = sm.ahm_iteration(x, y)
    np.testing.assert_allclose(value, g, rtol=1e-10, atol=1e-12)
    assert 1.7 <= trace.order_estimate <= 2.3
    np.testing.assert_allclose(sm.geodesic(x, y, 0.5), g, rtol=1e-12, atol=1e-13)


def test_multi_means_agree():
    rng = np.random.default_rng(2)
    ps = [random_spd(rng, 3) for _ in range(3)]
    g, trace = sm.karcher_mean(ps)
    assert trace.converged
    assert sm.karcher_residual(g, ps) <= 1e-10
    bmp, _ = sm.bmp_mean(ps)
    alm, _ = sm.alm_mean(ps)
    # BMP and ALM are geometric means in their own right, close to but not
    # equal to the Karcher mean.
    assert sm.riemannian_distance(bmp, g) < 0.1
    assert sm.riemannian_distance(alm, g) < 0.1
    h, _ = sm.holbrook_mean(ps, 3000)
    assert sm.riemannian_distance(h, g) < 1e-2
    lem = sm.log_euclidean_mean(ps)
    assert lem.shape == (3, 3)


def test_circumcenter_and_median_of_a_pair():
    rng = np.random.default_rng(3)
    x, y = random_spd(rng, 2), random_spd(rng, 2)
    mid = sm.geodesic(x, y, 0.5)
    c, _ = sm.circumcenter([x, y])
    assert sm.riemannian_distance(c, mid) <= 1e-3
    m, trace = sm.median([x, mid, y])
    assert sm.riemannian_distance(m, mid) <= 1e-2
    assert len(trace) > 0


def test_power_mean_matrix():
    x, y = np.array([[4.0]]), np.array([[9.0]])
    assert sm.power_mean_matrix(x, y, 0.5)[0, 0] == pytest.approx(6.25, rel=1e-13)


def test_sampling_is_antithetic_and_reproducible():
    center = np.diag([1.0, 2.0, 3.0])
    batch = sm.sample_spd(3, 10, 0.3, seed=5, center=center)
    assert len(batch) == 10
    assert sm.karcher_residual(center, batch) <= 1e-12
    again = sm.sample_spd(3, 10, 0.3, seed=5, center=center)
    assert all(np.array_equal(a, b) for a, b in zip(batch, again))
    assert sm.inductive_expectation(batch).shape == (3, 3)


def test_errors_map_to_python_exceptions():
    indefinite = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(sm.NotPositiveDefiniteError):
        sm.geometric_mean(indefinite, np.eye(2))
    with pytest.raises(ValueError):
        sm.geometric_mean(indefinite, np.eye(2))
    with pytest.raises(sm.ShapeError):
        sm.riemannian_distance(np.eye(2), np.eye(3))
    with pytest.raises(sm.DomainError):
        sm.geodesic(np.eye(2), np.eye(2), 1.5)
    rng = np.random.default_rng(4)
    ps = [random_spd(rng, 2) for _ in range(3)]
    with pytest.raises(sm.NonConvergenceError):
        sm.alm_mean(ps, tol=1e-300)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alcove_bethe.alcove import ModelParams, enumerate_lattice, rho, weight_to_com
from alcove_bethe.bethe import (
    BetheConvergenceError,
    additive_jacobian,
    additive_residual,
    bethe_vector,
    default_workers,
    free_solution,
    kappa_bounds,
    mu_to_mtuple,
    multiplicative_residual,
    pairwise_residual,
    solve_additive_system,
    solve_all,
    theta,
    theta_prime,
)

ts = st.floats(-0.95, 0.95, allow_nan=False)


@st.composite
def problems(draw, max_n=4, max_m=5):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(1, max_m))
    mu = draw(st.sampled_from(enumerate_lattice(n, m)))
    return n, m, mu, draw(ts)


def theta_alt(x, t):
    # same phase written as x + 2 arg(1 - t e^{-ix})^{-1}, no branch bookkeeping
    return x + 2 * np.arctan2(t * np.sin(x), 1 - t * np.cos(x))


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_theta_examples():
    for t in (-0.6, 0.0, 0.5, 0.9):
        assert theta(0.0, t) == 0.0
        assert theta(np.pi, t) == pytest.approx(np.pi, abs=1e-14)
        assert theta(-np.pi, t) == pytest.approx(-np.pi, abs=1e-14)
    assert theta(0.7 + 2 * np.pi, 0.5) - theta(0.7, 0.5) == pytest.approx(2 * np.pi, abs=1e-14)
    assert np.allclose(theta(np.linspace(-9, 9, 101), 0.0), np.linspace(-9, 9, 101))


@given(ts, st.floats(-30, 30))
def test_theta_against_closed_form(t, x):
    assert theta(x, t) == pytest.approx(theta_alt(x, t), abs=1e-12)
    assert theta(-x, t) == pytest.approx(-theta(x, t), abs=1e-12)
    assert theta(x + 2 * np.pi, t) == pytest.approx(theta(x, t) + 2 * np.pi, abs=1e-12)


@pytest.mark.parametrize("t", [-0.9, -0.3, 0.4, 0.95])
def test_theta_monotone_across_seams(t):
    x = np.linspace(-4 * np.pi, 4 * np.pi, 20001)
    assert np.all(np.diff(theta(x, t)) > 0)


@given(ts, st.floats(-10, 10))
def test_theta_prime_finite_difference(t, x):
    h = 1e-5
    fd = (theta(x + h, t) - theta(x - h, t)) / (2 * h)
    assert abs(theta_prime(x, t) - fd) <= 1e-6 * max(1.0, theta_prime(x, t))


@given(ts, st.floats(-10, 10))
def test_theta_prime_bounds(t, x):
    lo, hi = kappa_bounds(t)
    assert 0 < lo * (1 - 1e-12) <= theta_prime(x, t) <= hi * (1 + 1e-12)


def test_theta_prime_examples():
    assert np.all(theta_prime(np.linspace(-5, 5, 11), 0.0) == 1.0)
    t = 0.6
    assert theta_prime(0.0, t) == pytest.approx((1 + t) / (1 - t))
    assert theta_prime(0.0, t) == pytest.approx(kappa_bounds(t)[1])


@pytest.mark.parametrize("t", [1.0, -1.0, 2.0])
def test_theta_rejects_attractive(t):
    with pytest.raises(ValueError, match="repulsive"):
        theta(0.3, t)
    with pytest.raises(ValueError, match="repulsive"):
        theta_prime(0.3, t)


def test_mtuple_examples():
    assert list(mu_to_mtuple((0, 0))) == [2, 1, 0]
    assert list(mu_to_mtuple((4,))) == [5, 0]
    assert list(mu_to_mtuple((1, 1))) == [4, 2, 0]
    with pytest.raises(ValueError):
        mu_to_mtuple((1, 1), n=4)


@given(problems())
def test_mtuple_strictly_decreasing(case):
    n, m, mu, _ = case
    mt = mu_to_mtuple(mu)
    assert np.all(np.diff(mt) < 0)
    assert mt[0] - mt[-1] < m + n


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 3, 5])
def test_free_case_closed_form(n, m):
    params = ModelParams(n, m, 0.0)
    for mu in enumerate_lattice(n, m):
        sol = bethe_vector(mu, params)
        want = 2 * np.pi / (n + m) * (rho(n) + weight_to_com(mu))
        assert np.abs(sol.xi - want).max() <= 1e-12
        assert sol.iterations == 0


def test_free_solution_solves_linear_system():
    mt = mu_to_mtuple((2, 0, 1))
    xi = free_solution(mt, 5)
    assert np.abs(additive_residual(xi, mt, 5, 0.0)).max() < 1e-13


@pytest.mark.parametrize("t", [-0.5, 0.5, 0.9])
def test_n2_matches_bisection(t):
    # subtracting the two equations leaves m u + 2 theta(u) = 2 pi (m_1 - m_2)
    m = 3
    for k in range(m + 1):
        gap = k + 1
        u = bisect(lambda v: m * v + 2 * theta_alt(v, t) - 2 * np.pi * gap, 0.0, 2 * np.pi)
        sol = bethe_vector((k,), ModelParams(2, m, t))
        assert sol.xi == pytest.approx([u / 2, -u / 2], abs=1e-12)


def test_n2_golden_value():
    sol = bethe_vector((0,), ModelParams(2, 3, 0.5))
    assert sol.xi == pytest.approx([0.42403104, -0.42403104], abs=1e-8)
    assert 0 < sol.xi[0] - sol.xi[1] < 2 * np.pi


@given(problems())
def test_solution_properties(case):
    n, m, mu, t = case
    params = ModelParams(n, m, t)
    sol = bethe_vector(mu, params)
    assert sol.residual <= 1e-12
    assert abs(sol.xi.sum()) < 1e-12
    assert np.all(np.diff(sol.xi) < 0)
    assert sol.xi[0] - sol.xi[-1] < 2 * np.pi
    assert multiplicative_residual(sol.xi_full, m, t) <= 1e-10
    assert pairwise_residual(sol.xi, m, t) <= 1e-10
    # summing the equations kills the odd theta terms
    assert m * sol.xi_full.sum() == pytest.approx(2 * np.pi * sol.mtuple.sum(), abs=1e-10)


@given(problems())
def test_distance_bounds(case):
    n, m, mu, t = case
    sol = bethe_vector(mu, ModelParams(n, m, t))
    kp, km = kappa_bounds(t)
    xi, mt = sol.xi_full, sol.mtuple
    for j in range(n):
        for k in range(j + 1, n):
            d, q = xi[j] - xi[k], mt[j] - mt[k]
            assert 2 * np.pi * q / (m + n * km) - 1e-12 <= d <= 2 * np.pi * q / (m + n * kp) + 1e-12
            assert d < 2 * np.pi


def test_equal_quantum_numbers_collapse():
    params = ModelParams(4, 3, 0.6)
    xi = solve_additive_system([3, 1, 1, 0], params)
    assert xi[1] == pytest.approx(xi[2], abs=1e-12)
    assert xi[0] > xi[1] > xi[3]


@given(problems())
def test_jacobian_positive_along_iterates(case):
    n, m, mu, t = case
    seen = []
    solve_additive_system(mu_to_mtuple(mu), ModelParams(n, m, t), on_jacobian=seen.append)
    for jac in seen:
        assert np.allclose(jac, jac.T)
        assert np.linalg.eigvalsh(jac).min() >= m - 1e-10


def test_jacobian_matches_finite_difference():
    mt, m, t = mu_to_mtuple((1, 2)), 4, -0.4
    xi = np.array([2.0, 0.3, -1.1])
    h = 1e-6
    fd = np.column_stack(
        [(additive_residual(xi + h * e, mt, m, t) - additive_residual(xi - h * e, mt, m, t)) / (2 * h) for e in np.eye(3)]
    )
    assert np.allclose(additive_jacobian(xi, m, t), fd, atol=1e-7)


@pytest.mark.parametrize("n, m, mu", [(2, 3, (0,)), (3, 3, (1, 0)), (4, 2, (0, 1, 1))])
def test_smooth_in_t_across_zero(n, m, mu):
    h = 1e-4
    f = lambda t: bethe_vector(mu, ModelParams(n, m, t)).xi
    left, right = (f(0.0) - f(-h)) / h, (f(h) - f(0.0)) / h
    assert np.abs(left - right).max() <= 1e-4


@pytest.mark.parametrize("n, m, t", [(3, 4, 0.7), (4, 3, -0.6)])
def test_injective(n, m, t):
    xis = [s.xi for s in solve_all(ModelParams(n, m, t), workers=1)]
    for a in range(len(xis)):
        for b in range(a + 1, len(xis)):
            assert np.abs(xis[a] - xis[b]).max() > 1e-6


def test_bethe_vector_errors():
    with pytest.raises(ValueError, match="repulsive"):
        bethe_vector((0,), ModelParams(2, 3, 1.2))
    with pytest.raises(ValueError, match="P\\^\\(3\\)"):
        bethe_vector((4,), ModelParams(2, 3, 0.2))
    with pytest.raises(ValueError):
        bethe_vector((1,), ModelParams(3, 3, 0.2))


def test_non_convergence_reports_residual():
    with pytest.raises(BetheConvergenceError) as info:
        solve_additive_system(mu_to_mtuple((1, 1)), ModelParams(3, 2, 0.9), maxiter=1)
    assert info.value.residual > 1e-12
    assert math.isfinite(info.value.residual)


def test_to_json():
    sol = bethe_vector((1, 0), ModelParams(3, 2, 0.3))
    data = sol.to_json()
    assert set(data) == {"mu", "mtuple", "xi", "residual", "iterations"}
    assert data["mu"] == [1, 0] and data["mtuple"] == [3, 1, 0]
    assert np.array_equal(data["xi"], sol.xi)


def test_parallel_matches_serial(monkeypatch):
    params = ModelParams(4, 3, 0.45)
    serial = solve_all(params, workers=1)
    threaded = solve_all(params, workers=4)
    assert [s.mu for s in serial] == list(enumerate_lattice(4, 3))
    for a, b in zip(serial, threaded):
        assert a.mu == b.mu and np.array_equal(a.xi, b.xi)
    monkeypatch.setenv("ALCOVE_BETHE_THREADS", "3")
    assert default_workers() == 3

"""Dense solves, condition estimates, Gauss-Legendre rules, log-gamma."""

import math

import numpy as np
import pytest

from polyweib import numerics, percentile, special
from polyweib.weibull import WeibullBase, basis_vector


def test_log_gamma_at_one_and_two():
    assert numerics.log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert numerics.log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)


def test_log_gamma_half_integer():
    # Gamma(1.5) = sqrt(pi)/2
    assert numerics.log_gamma(1.5) == pytest.approx(-0.12078223763524522, rel=1e-13)


def test_log_gamma_recurrence():
    # log G(x+1) = log G(x) + log x, the defining functional equation
    for x in np.linspace(0.5, 100.0, 397):
        lhs = numerics.log_gamma(x + 1.0)
        rhs = numerics.log_gamma(x) + math.log(x)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_gauss_legendre_order_one():
    rule = numerics.gauss_legendre(1)
    assert rule.nodes == (0.0,)
    assert rule.weights == (2.0,)


def test_gauss_legendre_order_two():
    rule = numerics.gauss_legendre(2)
    r = 1.0 / math.sqrt(3.0)
    assert np.allclose(rule.nodes, (-r, r), rtol=1e-14)
    assert np.allclose(rule.weights, (1.0, 1.0), rtol=1e-14)


def test_gauss_legendre_integrates_quartic():
    rule = numerics.gauss_legendre(3)
    got = math.fsum(w * x**4 for x, w in zip(rule.nodes, rule.weights))
    assert got == pytest.approx(0.4, rel=1e-13)


@pytest.mark.parametrize("order", [1, 2, 3, 5, 8, 13, 21, 34])
def test_gauss_legendre_weights_sum_to_two(order):
    rule = numerics.gauss_legendre(order)
    assert math.fsum(rule.weights) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("order", [2, 4, 7, 11])
def test_gauss_legendre_polynomial_exactness(order):
    # a q-point rule is exact through degree 2q-1 on [-1, 1]
    rule = numerics.gauss_legendre(order)
    for deg in range(2 * order):
        got = math.fsum(w * x**deg for x, w in zip(rule.nodes, rule.weights))
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert got == pytest.approx(exact, abs=1e-12)


def test_solve_linear_identity():
    x, cond = numerics.solve_linear(np.eye(3), np.array([1.0, 2.0, 3.0]))
    assert np.allclose(x, [1.0, 2.0, 3.0], rtol=1e-15)
    assert cond == pytest.approx(1.0, rel=1e-10)


def test_solve_linear_flags_bad_scaling():
    x, cond = numerics.solve_linear(np.diag([1.0, 1e-8]), np.array([1.0, 1.0]))
    assert np.allclose(x, [1.0, 1e8], rtol=1e-12)
    assert 1e7 <= cond <= 1e9


def test_solve_linear_basis_interpolation_residual():
    # 21 basis rows at evenly spaced probabilities, normal-quantile right side:
    # the solve must stay backward stable despite extreme conditioning
    base = WeibullBase(1.0, 4.0)
    grid = percentile.pm_grid(21, 1e-4, 1.0 - 1e-4)
    A = np.vstack([basis_vector(base, u, 20) for u in grid])
    b = np.array([special.norm_quantile(u) for u in grid])
    x, cond = numerics.solve_linear(A, b)
    resid = np.linalg.norm(A @ x - b) / np.linalg.norm(b)
    assert resid <= 1e-8
    assert cond > 1e6


def test_solve_least_squares_consistent_system():
    A = np.vstack([np.eye(2), np.eye(2)])
    sol, resid, cond = numerics.solve_least_squares(A, np.array([1.0, 2.0, 1.0, 2.0]))
    assert np.allclose(sol, [1.0, 2.0], rtol=1e-14)
    assert resid <= 1e-12


def test_solve_least_squares_line_fit():
    A = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
    sol, resid, _ = numerics.solve_least_squares(A, np.array([0.0, 1.0, 2.0]))
    assert sol[0] == pytest.approx(0.0, abs=1e-14)
    assert sol[1] == pytest.approx(1.0, rel=1e-14)
    assert resid <= 1e-13


def test_solve_least_squares_tall_basis_system():
    base = WeibullBase(1.0, 6.0)
    grid = percentile.pm_grid(141, 1e-4, 1.0 - 1e-4)
    A = np.vstack([basis_vector(base, u, 20) for u in grid])
    b = np.array([special.norm_quantile(u) for u in grid])
    sol, resid, cond = numerics.solve_least_squares(A, b)
    assert np.all(np.isfinite(sol))
    assert math.isfinite(resid)
    assert math.isfinite(cond)


def test_solve_linear_random_well_conditioned():
    rng = np.random.default_rng(12345)
    for _ in range(25):
        A = rng.standard_normal((8, 8))
        if np.linalg.cond(A) >= 1e6:
            continue
        b = rng.standard_normal(8)
        x, _ = numerics.solve_linear(A, b)
        resid = np.linalg.norm(A @ x - b) / np.linalg.norm(b)
        assert resid <= 1e-10

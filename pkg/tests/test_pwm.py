"""Probability-weighted moments: estimators, moment matrix, data-driven fits."""

import math

import numpy as np
import pytest

from polyweib import pwm
from polyweib.errors import ConditioningError, InputError, InsufficientDataError
from polyweib.model import PolynomialQuantileModel
from polyweib.weibull import WeibullBase, quantile_z_array

W14 = WeibullBase(1.0, 4.0)
GAMMA_125 = 0.9064024770554771


def test_sample_pwm_order_zero_is_mean():
    vec = pwm.sample_pwm([5.0, 5.0, 5.0], 0)
    assert vec.values == (5.0,)
    assert vec.source == "sample"
    assert vec.m == 3


def test_sample_pwm_two_points():
    vec = pwm.sample_pwm([0.0, 1.0], 1)
    assert vec.values[1] == pytest.approx(0.5, rel=1e-15)


def test_sample_pwm_four_points():
    # (1/4) [ (1/3) 2 + (2/3) 3 + (3/3) 4 ] = 5/3
    vec = pwm.sample_pwm([1.0, 2.0, 3.0, 4.0], 1)
    assert vec.values[0] == pytest.approx(2.5, rel=1e-15)
    assert vec.values[1] == pytest.approx(5.0 / 3.0, rel=1e-14)


def test_sample_pwm_sorts_internally():
    a = pwm.sample_pwm([4.0, 1.0, 3.0, 2.0], 2)
    b = pwm.sample_pwm([1.0, 2.0, 3.0, 4.0], 2)
    assert a.values == b.values


def test_sample_pwm_insufficient_data():
    with pytest.raises(InsufficientDataError):
        pwm.sample_pwm([1.0, 2.0], 2)


def test_sample_pwm_rejects_non_finite():
    with pytest.raises(InputError):
        pwm.sample_pwm([1.0, float("inf"), 2.0], 1)
    with pytest.raises(InputError):
        pwm.sample_pwm([1.0, float("nan"), 2.0], 1)


def test_weibull_moment_constant_column():
    for r in range(6):
        assert pwm.weibull_moment(W14, r, 0) == pytest.approx(1.0 / (r + 1), rel=1e-13)


def test_weibull_moment_log_column():
    # z^4 = -ln(1-u) integrates to Gamma(2) = 1
    assert pwm.weibull_moment(W14, 0, 4) == pytest.approx(1.0, rel=1e-12)


def test_weibull_moment_mean():
    assert pwm.weibull_moment(W14, 0, 1) == pytest.approx(GAMMA_125, rel=1e-12)


def test_moment_matrix_order_zero():
    mm = pwm.moment_matrix(W14, 0)
    assert mm.entries == (1.0,)


def test_moment_matrix_order_one():
    mm = pwm.moment_matrix(W14, 1)
    want = (1.0, GAMMA_125, 0.5, GAMMA_125 * (1.0 - 2.0 ** -1.25))
    assert np.allclose(mm.entries, want, rtol=1e-12)


def test_moment_matrix_invariants():
    mm = pwm.moment_matrix(W14, 6)
    entries = np.array(mm.entries).reshape(7, 7)
    assert entries[0, 0] == 1.0
    assert np.all(entries >= 0.0)
    assert np.all(np.isfinite(entries))


def test_moment_matrix_high_degree_conditioning():
    mm = pwm.moment_matrix(W14, 20)
    assert mm.condition_estimate > 1e6


def test_moment_matrix_is_cached():
    assert pwm.moment_matrix(W14, 3) is pwm.moment_matrix(W14, 3)


def test_closed_form_and_quadrature_agree_smoke():
    for base in (W14, WeibullBase(1.0, 6.0)):
        cf = pwm.closed_form_matrix(base, 6)
        qd = pwm.quadrature_matrix(base, 6)
        assert np.max(np.abs(cf - qd) / np.abs(cf)) <= 1e-8


def test_fit_pwm_degree_zero_is_mean():
    data = [3.0, 1.0, 2.0, 6.0]
    model, diag = pwm.fit_pwm(data, W14, 0)
    assert model.coeffs == (3.0,)
    assert diag.residual <= 1e-15


def test_fit_pwm_recovers_base_variates():
    # stratified draws of the base itself: coefficients approach (0, 1)
    results = {}
    for m in (200, 20000):
        u = (np.arange(m) + 0.5) / m
        model, diag = pwm.fit_pwm(quantile_z_array(W14, u), W14, 1)
        assert diag.residual <= 1e-8
        results[m] = model.coeffs
    assert abs(results[20000][0]) < abs(results[200][0])
    assert abs(results[20000][1] - 1.0) < abs(results[200][1] - 1.0)
    assert results[20000][0] == pytest.approx(0.0, abs=1e-3)
    assert results[20000][1] == pytest.approx(1.0, abs=1e-3)


def test_fit_pwm_shift_scale_equivariance():
    rng = np.random.default_rng(11)
    x = rng.gamma(4.0, 1.0, 400)
    mx, _ = pwm.fit_pwm(x, W14, 4)
    my, _ = pwm.fit_pwm(3.0 * x + 5.0, W14, 4)
    cx = np.array(mx.coeffs)
    cy = np.array(my.coeffs)
    assert cy[0] == pytest.approx(3.0 * cx[0] + 5.0, rel=1e-8)
    assert np.allclose(cy[1:], 3.0 * cx[1:], rtol=1e-8)


def test_fit_pwm_insufficient_data():
    with pytest.raises(InsufficientDataError):
        pwm.fit_pwm([1.0, 2.0, 3.0], W14, 3)


def test_fit_pwm_constant_data():
    with pytest.raises(ConditioningError) as exc:
        pwm.fit_pwm(np.full(100, 3.3), W14, 2)
    assert "degree 0" in str(exc.value)


def test_fit_pwm_high_degree_rejected():
    # at degree 20 the moment matrix is too ill-conditioned for double
    # precision coefficients; the fit must refuse rather than return noise
    rng = np.random.default_rng(4)
    data = rng.normal(size=5000)
    with pytest.raises(ConditioningError) as exc:
        pwm.fit_pwm(data, W14, 20)
    assert "degree" in str(exc.value)


def test_fit_pwm_diagnostics_fields():
    rng = np.random.default_rng(2)
    data = rng.gamma(10.0, 1.0, 1000)
    model, diag = pwm.fit_pwm(data, W14, 6)
    assert diag.sample_size == 1000
    assert diag.degree == 6
    assert diag.residual <= 1e-8
    assert math.isfinite(diag.condition_estimate)
    assert diag.monotonicity.grid_size >= 2
    assert len(diag.pwms.values) == 7


def test_model_pwm_identity_model(identity_model):
    vec = pwm.model_pwm(identity_model, 0)
    assert vec.values[0] == pytest.approx(GAMMA_125, rel=1e-10)
    assert vec.source == "model"


def test_model_pwm_constant_model():
    c = 4.25
    m = PolynomialQuantileModel(W14, (c,))
    vec = pwm.model_pwm(m, 5)
    for r, beta in enumerate(vec.values):
        assert beta == pytest.approx(c / (r + 1), rel=1e-12)


def test_fit_then_model_pwm_round_trip():
    rng = np.random.default_rng(6)
    data = rng.lognormal(0.0, 0.5, 2000)
    model, _ = pwm.fit_pwm(data, W14, 8)
    fitted = np.array(pwm.model_pwm(model, 8).values)
    sample = np.array(pwm.sample_pwm(data, 8).values)
    assert np.max(np.abs(fitted - sample) / np.abs(sample)) <= 1e-8

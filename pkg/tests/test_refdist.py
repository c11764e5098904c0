"""Reference distributions: spec grammar, quantiles, densities, sampling."""

import math

import numpy as np
import pytest
from scipy import integrate

from polyweib import refdist
from polyweib.errors import DomainError, InputError, UnsupportedOperationError


def test_parse_spec_grammar():
    d = refdist.parse_spec("gamma(a=10,b=1)")
    assert d.id == "gamma"
    assert dict(d.params) == {"a": 10.0, "b": 1.0}
    d = refdist.parse_spec("t(nu=5)")
    assert d.id == "student_t"
    d = refdist.parse_spec("mixture(a=2.4,p=0.5)")
    assert dict(d.params) == {"a": 2.4, "p": 0.5}
    d = refdist.parse_spec("weibull-self")
    assert d.id == "weibull_self"


def test_parse_spec_fills_defaults():
    d = refdist.parse_spec("normal(mu=0)")
    assert dict(d.params) == {"mu": 0.0, "sigma": 1.0}


def test_parse_spec_rejects_unknown_name():
    with pytest.raises(InputError):
        refdist.parse_spec("frobnitz(a=1)")


def test_parse_spec_rejects_unknown_parameter():
    with pytest.raises(InputError):
        refdist.parse_spec("normal(mu=0,tau=2)")


def test_parse_spec_rejects_bad_values():
    with pytest.raises(DomainError):
        refdist.parse_spec("gamma(a=-1,b=1)")
    with pytest.raises(DomainError):
        refdist.parse_spec("normal(mu=0,sigma=0)")
    with pytest.raises(DomainError):
        refdist.parse_spec("mixture(a=2.4,p=1.5)")


def test_quantile_normal_median():
    d = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    assert refdist.ref_quantile(d, 0.5) == 0.0


def test_quantile_chisquare_two_dof():
    # two degrees of freedom is exponential with mean 2
    d = refdist.make_distribution("chisquare", nu=2.0)
    u = 1.0 - math.exp(-1.0)
    assert refdist.ref_quantile(d, u) == pytest.approx(2.0, rel=1e-10)


def test_quantile_cauchy_quartile():
    d = refdist.make_distribution("student_t", nu=1.0)
    assert refdist.ref_quantile(d, 0.75) == pytest.approx(1.0, rel=1e-10)


def test_quantile_rayleigh_median():
    d = refdist.make_distribution("rayleigh", nu=1.0)
    assert refdist.ref_quantile(d, 0.5) == pytest.approx(1.1774100225154747, rel=1e-12)


def test_quantile_rejects_bad_u():
    d = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    for bad in (0.0, 1.0, -0.2, 1.2):
        with pytest.raises(DomainError):
            refdist.ref_quantile(d, bad)


def test_mixture_has_no_quantile():
    d = refdist.make_distribution("mixture", a=2.4, p=0.5)
    with pytest.raises(UnsupportedOperationError):
        refdist.ref_quantile(d, 0.5)


def test_pdf_normal_peak():
    d = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    assert refdist.ref_pdf(d, 0.0) == pytest.approx(0.3989422804014327, rel=1e-13)


def test_cdf_beta_symmetric_midpoint():
    d = refdist.make_distribution("beta", a=1.5, b=1.5)
    assert refdist.ref_cdf(d, 0.5) == pytest.approx(0.5, abs=1e-13)


def test_cdf_rejects_outside_support():
    d = refdist.make_distribution("gamma", a=2.0, b=1.0)
    with pytest.raises(DomainError):
        refdist.ref_cdf(d, -0.5)
    d = refdist.make_distribution("beta", a=2.0, b=2.0)
    with pytest.raises(DomainError):
        refdist.ref_pdf(d, 1.5)


def test_mixture_density_is_bimodal():
    d = refdist.make_distribution("mixture", a=2.4, p=0.5)
    xs = np.linspace(-3.0, 5.5, 1701)
    fs = np.array([refdist.ref_pdf(d, float(x)) for x in xs])
    inner = (fs[1:-1] > fs[:-2]) & (fs[1:-1] > fs[2:])
    peaks = xs[1:-1][inner]
    # equal-weight components pull the modes inward, to about 0.2 and 2.2
    assert len(peaks) == 2
    assert abs(peaks[0] - 0.0) <= 0.3
    assert abs(peaks[1] - 2.4) <= 0.3
    assert peaks[0] + peaks[1] == pytest.approx(2.4, abs=0.02)


SWEEP = [
    ("lognormal", {"mu": 0.0, "sigma": 1.0}),
    ("lognormal", {"mu": 100.0, "sigma": 0.5}),
    ("normal", {"mu": 0.0, "sigma": 1.0}),
    ("gamma", {"a": 1.0, "b": 1.0}),
    ("gamma", {"a": 100.0, "b": 100.0}),
    ("beta", {"a": 1.5, "b": 20.0}),
    ("beta", {"a": 20.0, "b": 20.0}),
    ("rayleigh", {"nu": 200.0}),
    ("chisquare", {"nu": 2.0}),
    ("chisquare", {"nu": 100.0}),
    ("student_t", {"nu": 2.0}),
    ("student_t", {"nu": 100.0}),
]


@pytest.mark.parametrize("name,params", SWEEP)
def test_cdf_quantile_round_trip(name, params):
    d = refdist.make_distribution(name, **params)
    for u in np.linspace(1e-4, 1.0 - 1e-4, 89):
        x = refdist.ref_quantile(d, float(u))
        assert refdist.ref_cdf(d, x) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize(
    "name,params",
    [
        ("normal", {"mu": 0.0, "sigma": 1.0}),
        ("lognormal", {"mu": 0.0, "sigma": 1.0}),
        ("gamma", {"a": 10.0, "b": 1.0}),
        ("beta", {"a": 1.5, "b": 1.5}),
        ("rayleigh", {"nu": 1.0}),
        ("chisquare", {"nu": 3.0}),
        ("student_t", {"nu": 5.0}),
        ("mixture", {"a": 2.4, "p": 0.5}),
    ],
)
def test_pdf_is_cdf_derivative(name, params):
    d = refdist.make_distribution(name, **params)
    if name == "mixture":
        xs = np.linspace(-2.0, 4.0, 25)
        scale = 1.0
    else:
        xs = [refdist.ref_quantile(d, u) for u in np.linspace(0.05, 0.95, 25)]
        scale = max(1e-3, np.ptp(np.asarray(xs)))
    for x in xs:
        h = 1e-6 * scale
        fd = (refdist.ref_cdf(d, float(x) + h) - refdist.ref_cdf(d, float(x) - h)) / (2.0 * h)
        want = refdist.ref_pdf(d, float(x))
        if want > 1e-12:
            assert fd == pytest.approx(want, rel=1e-4)


@pytest.mark.parametrize(
    "name,params,lo,hi",
    [
        ("normal", {"mu": 0.0, "sigma": 1.0}, -9.0, 9.0),
        ("gamma", {"a": 10.0, "b": 1.0}, 0.0, 60.0),
        ("beta", {"a": 1.5, "b": 1.5}, 0.0, 1.0),
        ("mixture", {"a": 2.4, "p": 0.5}, -9.0, 12.0),
    ],
)
def test_pdf_integrates_to_one(name, params, lo, hi):
    d = refdist.make_distribution(name, **params)
    total, err = integrate.quad(lambda x: refdist.ref_pdf(d, x), lo, hi, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_sample_empty():
    d = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    assert refdist.ref_sample(d, 0, seed=1).size == 0


def test_sample_deterministic():
    d = refdist.make_distribution("gamma", a=2.0, b=3.0)
    a = refdist.ref_sample(d, 100, seed=42)
    b = refdist.ref_sample(d, 100, seed=42)
    assert np.array_equal(a, b)


def test_mixture_sample_mean():
    d = refdist.make_distribution("mixture", a=2.4, p=0.5)
    n = 100000
    xs = refdist.ref_sample(d, n, seed=99)
    # E = a p; Var = 1 + a^2 p (1-p)
    se = math.sqrt((1.0 + 2.4**2 * 0.25) / n)
    assert abs(xs.mean() - 1.2) <= 3.0 * se


def test_normal_sample_variance():
    d = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    n = 100000
    xs = refdist.ref_sample(d, n, seed=7)
    # Var of the sample variance of a normal is 2 sigma^4 / (n - 1)
    se = math.sqrt(2.0 / (n - 1))
    assert abs(xs.var(ddof=1) - 1.0) <= 3.0 * se

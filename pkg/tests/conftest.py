"""Shared fixtures: a few reference fits reused across test modules."""

import numpy as np
import pytest

from polyweib import percentile, refdist
from polyweib.model import PolynomialQuantileModel
from polyweib.weibull import WeibullBase


@pytest.fixture(scope="session")
def w14():
    return WeibullBase(1.0, 4.0)


@pytest.fixture(scope="session")
def identity_model(w14):
    """x = z, i.e. the base's own quantile function."""
    return PolynomialQuantileModel(w14, (0.0, 1.0))


@pytest.fixture(scope="session")
def rayleigh_model(w14):
    """x = sqrt(2) z^2, the unit Rayleigh quantile."""
    coeffs = (0.0, 0.0, float(np.sqrt(2.0)))
    return PolynomialQuantileModel(w14, coeffs)


@pytest.fixture(scope="session")
def normal_fit():
    """Standard normal fit with default settings, plus its error report."""
    dist = refdist.make_distribution("normal", mu=0.0, sigma=1.0)
    model, report = percentile.fit_named(dist)
    return dist, model, report

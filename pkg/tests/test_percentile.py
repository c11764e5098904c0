"""Percentile matching: grids, fits, audits, and the named-distribution front end."""

import math

import mpmath as mp
import numpy as np
import pytest

from polyweib import percentile, refdist
from polyweib.errors import DomainError, UnsupportedOperationError
from polyweib.weibull import WeibullBase, quantile_z, quantile_z_mp

W14 = WeibullBase(1.0, 4.0)
LO, HI = 1e-4, 1.0 - 1e-4


def test_pm_grid_two_points():
    assert percentile.pm_grid(2, 0.1, 0.9).tolist() == [0.1, 0.9]


def test_pm_grid_default_spacing():
    g = percentile.pm_grid(21, LO, HI)
    assert g.size == 21
    assert g[0] == LO and g[-1] == HI
    d = np.diff(g)
    assert np.allclose(d, (HI - LO) / 20.0, rtol=1e-12)
    assert d[0] == pytest.approx(0.049990, abs=1e-6)


def test_pm_grid_rejects_bad_arguments():
    with pytest.raises(DomainError):
        percentile.pm_grid(3, 0.0, 0.9)
    with pytest.raises(DomainError):
        percentile.pm_grid(3, 0.1, 1.0)
    with pytest.raises(DomainError):
        percentile.pm_grid(1, 0.1, 0.9)
    with pytest.raises(DomainError):
        percentile.pm_grid(5, 0.9, 0.1)


def test_fit_pm_recovers_base_itself():
    grid = percentile.pm_grid(21, LO, HI)
    target = refdist.quantile_target(refdist.make_distribution("weibull-self"), base=W14)
    model, resid, cond = percentile.fit_pm(target, W14, 20, grid)
    coeffs = np.array(model.coeffs)
    assert abs(coeffs[1] - 1.0) <= 1e-8
    mask = np.ones(21, dtype=bool)
    mask[1] = False
    assert np.max(np.abs(coeffs[mask])) <= 1e-8
    report = percentile.audit(model, target)
    assert report.maximum <= 1e-8


def test_fit_pm_recovers_rayleigh_exactly():
    grid = percentile.pm_grid(21, LO, HI)
    dist = refdist.make_distribution("rayleigh", nu=1.0)
    model, _, _ = percentile.fit_pm(refdist.quantile_target(dist, base=W14), W14, 20, grid)
    coeffs = np.array(model.coeffs)
    assert coeffs[2] == pytest.approx(math.sqrt(2.0), rel=1e-9)
    mask = np.ones(21, dtype=bool)
    mask[2] = False
    assert np.max(np.abs(coeffs[mask])) <= 1e-6


def test_fit_pm_normal_accuracy(normal_fit):
    _, _, report = normal_fit
    assert report.maximum <= 0.16


def test_fit_pm_interpolates_at_nodes(normal_fit):
    dist, model, _ = normal_fit
    from polyweib.model import quantile

    target = refdist.quantile_target(dist, base=model.base)
    grid = percentile.basis_even_grid(model.base, 21, LO, HI)
    for u in grid:
        want = target(float(u))
        got = quantile(model, float(u))
        assert got == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_fit_pm_rejects_non_finite_target():
    grid = percentile.pm_grid(21, LO, HI)

    def bad(u):
        return float("nan") if u > 0.5 else u

    with pytest.raises(Exception):
        percentile.fit_pm(bad, W14, 20, grid)


def test_basis_closure_low_degree_double_targets():
    # degree small enough that double-precision targets do not limit recovery
    rng = np.random.default_rng(7)
    c = rng.uniform(-1.0, 1.0, 7)

    def target(u):
        return float(np.polynomial.polynomial.polyval(quantile_z(W14, u), c))

    grid = percentile.pm_grid(7, LO, HI)
    model, _, _ = percentile.fit_pm(target, W14, 6, grid)
    assert np.max(np.abs(np.array(model.coeffs) - c)) <= 1e-6


def test_basis_closure_full_degree_exact_targets():
    # at degree 20 the recovery is limited only by the target's own precision,
    # so feed the fit an arbitrary-precision evaluation path
    rng = np.random.default_rng(3)
    c = rng.uniform(-1.0, 1.0, 21)

    def target(u):
        return float(np.polynomial.polynomial.polyval(quantile_z(W14, u), c))

    def target_mp(u):
        z = quantile_z_mp(W14, u)
        acc = mp.mpf(0)
        for ci in reversed(c):
            acc = acc * z + mp.mpf(float(ci))
        return acc

    target.quantile_mp = target_mp
    grid = percentile.pm_grid(21, LO, HI)
    model, _, _ = percentile.fit_pm(target, W14, 20, grid)
    assert np.max(np.abs(np.array(model.coeffs) - c)) <= 1e-6


def test_audit_exact_model_scores_zero(identity_model):
    target = refdist.quantile_target(
        refdist.make_distribution("weibull-self"), base=identity_model.base
    )
    report = percentile.audit(identity_model, target)
    assert report.maximum <= 1e-8
    assert report.skipped == 0
    assert len(report.grid) == 10000


def test_audit_is_deterministic(normal_fit):
    dist, model, _ = normal_fit
    target = refdist.quantile_target(dist, base=model.base)
    a = percentile.audit(model, target, 2001)
    b = percentile.audit(model, target, 2001)
    assert a.grid == b.grid
    assert a.rel_errors == b.rel_errors
    assert (a.average, a.minimum, a.maximum) == (b.average, b.minimum, b.maximum)


def test_audit_near_zero_fallback(normal_fit):
    # an odd grid lands exactly on u = 0.5 where the normal quantile is 0;
    # that point is scored absolutely and counted, not folded into the ratios
    dist, model, _ = normal_fit
    target = refdist.quantile_target(dist, base=model.base)
    odd = percentile.audit(model, target, 10001)
    even = percentile.audit(model, target, 10000)
    assert odd.skipped == 1
    assert even.skipped == 0
    assert math.isfinite(odd.maximum)


def test_audit_summary_matches_vectors(normal_fit):
    dist, model, _ = normal_fit
    target = refdist.quantile_target(dist, base=model.base)
    rep = percentile.audit(model, target, 3001)
    scored = np.array(rep.rel_errors)[np.array(rep.scored)]
    assert rep.maximum == pytest.approx(scored.max(), rel=1e-15)
    assert rep.minimum == pytest.approx(scored.min(), abs=1e-300)
    assert rep.average == pytest.approx(scored.mean(), rel=1e-12)


def test_audit_grid_is_dense_enough(normal_fit):
    dist, model, _ = normal_fit
    target = refdist.quantile_target(dist, base=model.base)
    coarse = percentile.audit(model, target, 10000)
    dense = percentile.audit(model, target, 100000)
    assert dense.maximum <= 2.0 * coarse.maximum


def test_fit_named_student_t_switches_base():
    model, report, meta = percentile.fit_named_detailed("t(nu=5)")
    assert model.base.k == 6.0
    assert meta["k"] == 6.0
    assert meta["grid_count"] == 141
    assert report.maximum <= 1.34


def test_fit_named_default_metadata():
    model, report, meta = percentile.fit_named_detailed("normal(mu=0,sigma=1)")
    assert model.base.k == 4.0
    assert meta["grid_count"] == 21
    assert meta["degree"] == 20
    assert meta["objective"] == "interpolation"


def test_fit_named_overdetermined_metadata():
    _, _, meta = percentile.fit_named_detailed("normal(mu=0,sigma=1)", grid_count=41)
    assert meta["objective"] == "relative-least-squares"


def test_fit_named_gamma_accuracy():
    _, report = percentile.fit_named(refdist.make_distribution("gamma", a=10.0, b=1.0))
    assert report.maximum <= 0.074


def test_fit_named_beta_accuracy():
    _, report = percentile.fit_named(refdist.make_distribution("beta", a=1.5, b=1.5))
    assert report.maximum <= 0.0085


def test_fit_named_rejects_mixture():
    with pytest.raises(UnsupportedOperationError):
        percentile.fit_named(refdist.make_distribution("mixture", a=2.4, p=0.5))

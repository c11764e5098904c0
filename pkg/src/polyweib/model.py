"""Polynomial quantile models x = a_0 + a_1 z + ... + a_n z^n over a Weibull
basis z(u), with evaluation, derivative, PDF reconstruction, numerical CDF
inversion, monotonicity audit, and inverse-transform sampling.
"""

import functools
import json
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (DomainError, InfiniteDerivativeError, InputError,
                     NonMonotoneError, OutOfRangeWarning)
from .weibull import WeibullBase, quantile_z, quantile_z_array

DEFAULT_RANGE = (1e-4, 1.0 - 1e-4)


@dataclass(frozen=True)
class PolynomialQuantileModel:
    """Coefficients over a WeibullBase, certified on ``valid_range``.

    Evaluation outside the validated probability interval is possible but is
    flagged with :class:`OutOfRangeWarning`; the approximation there was
    never checked against anything.
    """

    base: WeibullBase
    coeffs: Tuple[float, ...]
    valid_range: Tuple[float, float] = DEFAULT_RANGE

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) == 0:
            raise InputError("a model needs at least the constant coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise InputError("model coefficients must be finite")
        lo, hi = (float(self.valid_range[0]), float(self.valid_range[1]))
        if not (0.0 < lo < hi < 1.0):
            raise DomainError(f"valid_range must satisfy 0 < lo < hi < 1, got {self.valid_range!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "valid_range", (lo, hi))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class MonotonicityReport:
    """Derivative sign scan over the validated range."""

    grid_size: int
    checked: int
    violations: Tuple[Tuple[float, float], ...]  # merged (u_lo, u_hi) runs
    n_violations: int

    @property
    def ok(self) -> bool:
        return self.n_violations == 0


def _horner(coeffs, z):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    return acc


_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ac = _SPLIT * a
    ah = ac - (ac - a)
    al = a - ah
    bc = _SPLIT * b
    bh = bc - (bc - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _comp_horner(coeffs, z):
    """Compensated Horner evaluation (error-free transformations).

    High-degree monomial coefficients alternate in sign with magnitudes far
    above the result, so plain Horner carries absolute roundoff around
    eps * sum|a_i z^i|; that noise is what a caller differentiating the
    quantile numerically would see. Compensation brings it back to
    eps * |result|. Works elementwise on arrays as well as floats.
    """
    acc = z * 0.0 + coeffs[-1]
    comp = z * 0.0
    for c in reversed(coeffs[:-1]):
        p, pe = _two_prod(acc, z)
        acc, se = _two_sum(p, c)
        comp = comp * z + (pe + se)
    return acc + comp


def _check_u_interval(u, lo_incl: float, hi_excl: float, what: str):
    if not (isinstance(u, (int, float)) and math.isfinite(u)):
        raise DomainError(f"{what} must be a finite real, got {u!r}")
    if u < lo_incl or u >= hi_excl:
        raise DomainError(f"{what} must lie in [{lo_incl}, {hi_excl}), got {u!r}")


def quantile(model: PolynomialQuantileModel, u: float) -> float:
    """Model quantile at u, by Horner evaluation in z.

    u must lie in [0, 1); values inside [0, 1) but outside the validated
    range are evaluated with an OutOfRangeWarning.
    """
    _check_u_interval(u, 0.0, 1.0, "probability")
    lo, hi = model.valid_range
    if u < lo or u > hi:
        warnings.warn(
            f"u={u!r} is outside the validated range [{lo}, {hi}]; "
            "the value is extrapolated and uncertified", OutOfRangeWarning,
            stacklevel=2)
    z = quantile_z(model.base, u)
    return float(_comp_horner(model.coeffs, z))


def quantile_array(model: PolynomialQuantileModel, u) -> np.ndarray:
    """Vectorized quantile; same range semantics as :func:`quantile`."""
    u = np.asarray(u, dtype=float)
    if u.size and (u.min() < 0.0 or u.max() >= 1.0):
        raise DomainError("probabilities must lie in [0, 1)")
    lo, hi = model.valid_range
    if u.size and (u.min() < lo or u.max() > hi):
        warnings.warn("some probabilities are outside the validated range",
                      OutOfRangeWarning, stacklevel=2)
    z = quantile_z_array(model.base, u)
    return _comp_horner(model.coeffs, z)


def quantile_derivative(model: PolynomialQuantileModel, u: float) -> float:
    """dF^{-1}/du = sum_i a_i (i/k) (1-u)^{-1} (-ln(1-u))^{i/k - 1}."""
    if not (isinstance(u, (int, float)) and math.isfinite(u)):
        raise DomainError(f"probability must be a finite real, got {u!r}")
    if u == 0.0:
        if model.degree >= 1:
            raise InfiniteDerivativeError(
                "the quantile derivative diverges at u = 0 for terms of "
                "order below the base shape k")
        return 0.0
    if not 0.0 < u < 1.0:
        raise DomainError(f"derivative needs 0 < u < 1, got {u!r}")
    if model.degree == 0:
        return 0.0
    z = quantile_z(model.base, u)
    # d/du of sum a_i z^i = (sum i a_i z^{i-1}) * dz/du
    dcoeffs = [i * c for i, c in enumerate(model.coeffs)][1:]
    poly = _horner(dcoeffs, z)
    t = -math.log1p(-u)
    dz = model.base.lam * t ** (1.0 / model.base.k - 1.0) / (model.base.k * (1.0 - u))
    return float(poly * dz)


def derivative_array(model: PolynomialQuantileModel, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.size and (u.min() <= 0.0 or u.max() >= 1.0):
        raise DomainError("derivative needs 0 < u < 1")
    if model.degree == 0:
        return np.zeros_like(u)
    z = quantile_z_array(model.base, u)
    dcoeffs = [i * c for i, c in enumerate(model.coeffs)][1:]
    poly = _horner(dcoeffs, z)
    t = -np.log1p(-u)
    dz = model.base.lam * t ** (1.0 / model.base.k - 1.0) / (model.base.k * (1.0 - u))
    return poly * dz


def check_monotone(model: PolynomialQuantileModel, grid_size: int) -> MonotonicityReport:
    """Scan the derivative sign on grid_size evenly spaced points in u."""
    if not isinstance(grid_size, int) or isinstance(grid_size, bool) or grid_size < 2:
        raise DomainError(f"grid_size must be an integer >= 2, got {grid_size!r}")
    lo, hi = model.valid_range
    u = np.linspace(lo, hi, grid_size)
    d = derivative_array(model, u)
    bad = d <= 0.0
    n_bad = int(bad.sum())
    runs = []
    if n_bad:
        idx = np.flatnonzero(bad)
        start = prev = idx[0]
        for i in idx[1:]:
            if i == prev + 1:
                prev = i
                continue
            runs.append((float(u[start]), float(u[prev])))
            start = prev = i
        runs.append((float(u[start]), float(u[prev])))
    return MonotonicityReport(grid_size, grid_size, tuple(runs), n_bad)


@functools.lru_cache(maxsize=256)
def _monotone_guard(model: PolynomialQuantileModel) -> MonotonicityReport:
    return check_monotone(model, 1024)


def _require_monotone(model: PolynomialQuantileModel):
    report = _monotone_guard(model)
    if not report.ok:
        first = report.violations[0]
        raise NonMonotoneError(
            "model is not strictly increasing on its validated range; "
            f"derivative <= 0 near u in [{first[0]:.6g}, {first[1]:.6g}]",
            interval=first)


def model_range(model: PolynomialQuantileModel) -> Tuple[float, float]:
    """x-interval spanned over the validated probability range."""
    lo, hi = model.valid_range
    return quantile(model, lo), quantile(model, hi)


def cdf_at(model: PolynomialQuantileModel, x: float, *, _warn: bool = True) -> float:
    """Invert the model quantile by bisection to 1e-12 in u.

    Outside the modeled x-range the result clamps to the range edge, with an
    OutOfRangeWarning.
    """
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    _require_monotone(model)
    lo, hi = model.valid_range
    x_lo, x_hi = model_range(model)
    if x <= x_lo or x >= x_hi:
        if x != x_lo and x != x_hi and _warn:
            warnings.warn(
                f"x={x!r} is outside the modeled range [{x_lo:.6g}, {x_hi:.6g}]; "
                "clamping to the nearer edge", OutOfRangeWarning, stacklevel=2)
        return lo if x <= x_lo else hi
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        if quantile(model, mid) < x:
            a = mid
        else:
            b = mid
        if b - a <= 1e-13:
            break
    return 0.5 * (a + b)


def pdf_at(model: PolynomialQuantileModel, x: float) -> float:
    """Reconstructed density 1 / (dF^{-1}/du) at the u where quantile(u) = x."""
    _require_monotone(model)
    x_lo, x_hi = model_range(model)
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < x_lo or x > x_hi:
        raise DomainError(
            f"x={x!r} is outside the modeled range [{x_lo:.6g}, {x_hi:.6g}]")
    u = cdf_at(model, x, _warn=False)
    d = quantile_derivative(model, u)
    if d <= 0.0:
        raise NonMonotoneError(
            f"nonpositive quantile derivative at u={u!r}; density undefined")
    return 1.0 / d


def sample(model: PolynomialQuantileModel, count: int, seed=None) -> np.ndarray:
    """Inverse-transform sampling with u drawn uniformly on the validated
    range from a seeded generator. Identical seeds give identical output."""
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise DomainError(f"sample count must be a nonnegative integer, got {count!r}")
    _require_monotone(model)
    if count == 0:
        return np.empty(0)
    lo, hi = model.valid_range
    rng = np.random.default_rng(seed)
    u = lo + (hi - lo) * rng.random(count)
    return quantile_array(model, u)


# ------------------------------------------------------------ interchange --

def _fmt(x: float) -> str:
    # 17 significant digits: exact binary round trip
    return f"{x:.16e}"


def model_to_json(model: PolynomialQuantileModel) -> str:
    """Serialize to the interchange JSON document
    {lambda, k, degree, coeffs[], u_lo, u_hi} with full-precision decimals."""
    coeffs = ", ".join(_fmt(c) for c in model.coeffs)
    lo, hi = model.valid_range
    return (
        "{\n"
        f'  "lambda": {_fmt(model.base.lam)},\n'
        f'  "k": {_fmt(model.base.k)},\n'
        f'  "degree": {model.degree},\n'
        f'  "coeffs": [{coeffs}],\n'
        f'  "u_lo": {_fmt(lo)},\n'
        f'  "u_hi": {_fmt(hi)}\n'
        "}\n"
    )


def model_from_dict(doc: dict) -> PolynomialQuantileModel:
    try:
        lam = float(doc["lambda"])
        k = float(doc["k"])
        degree = int(doc["degree"])
        coeffs = [float(c) for c in doc["coeffs"]]
        lo = float(doc["u_lo"])
        hi = float(doc["u_hi"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model document: {exc}") from exc
    if len(coeffs) != degree + 1:
        raise InputError(
            f"model document declares degree {degree} but carries "
            f"{len(coeffs)} coefficients")
    return PolynomialQuantileModel(WeibullBase(lam, k), tuple(coeffs), (lo, hi))


def model_from_json(text: str) -> PolynomialQuantileModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("model document must be a JSON object")
    return model_from_dict(doc)

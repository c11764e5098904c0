"""Special-function kernels backing the reference distributions.

Normal CDF/quantile, regularized incomplete gamma and beta plus their
inverses. Forward functions use the classic series / continued-fraction
switches; inverses run safeguarded Newton iterations that always keep a
bracket, matching whichever tail of the function is numerically small so
that accuracy survives near both endpoints. Precision is pinned down by
oracle tests, not trusted blindly.
"""

import math

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_MAXIT = 500


def norm_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_quantile(u: float) -> float:
    """Inverse standard normal CDF on (0, 1)."""
    if not (isinstance(u, (int, float)) and 0.0 < u < 1.0):
        raise DomainError(f"normal quantile needs 0 < u < 1, got {u!r}")
    if u == 0.5:
        return 0.0
    q = u - 0.5
    if abs(q) < 0.2:
        x = q * 2.5066282746310002
    else:
        side = min(u, 1.0 - u)
        x = -math.sqrt(-2.0 * math.log(side))
        if q > 0.0:
            x = -x
    lo, hi = -40.0, 40.0
    for _ in range(120):
        f = norm_cdf(x) - u
        if f > 0.0:
            hi = x
        elif f < 0.0:
            lo = x
        else:
            return x
        d = norm_pdf(x)
        if d > 0.0 and math.isfinite(d):
            xn = x - f / d
            if not (lo < xn < hi):
                xn = 0.5 * (lo + hi)
        else:
            xn = 0.5 * (lo + hi)
        if xn == x or abs(xn - x) <= 1e-17 + 2.0 * _EPS * abs(xn):
            return xn
        x = xn
    return x


# ---------------------------------------------------------------- gamma ----

def _check_gamma_args(a, x):
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0.0):
        raise DomainError(f"shape a must be finite and positive, got {a!r}")
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x >= 0.0):
        raise DomainError(f"x must be finite and nonnegative, got {x!r}")


def _gamma_series(a: float, x: float) -> float:
    # lower-tail series, valid for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    # upper-tail continued fraction (modified Lentz), valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gammainc_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def gammainc_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def gamma_density_reg(a: float, x: float) -> float:
    """dP/dx = x^(a-1) e^(-x) / Gamma(a)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        if a < 1.0:
            return math.inf
        return 1.0 if a == 1.0 else 0.0
    return math.exp((a - 1.0) * math.log(x) - x - math.lgamma(a))


def gammainc_inv(a: float, p: float) -> float:
    """x with P(a, x) = p, for 0 <= p < 1.

    Newton matches P on the lower half and Q = 1 - p on the upper half, so
    the quantity driven to zero is never a small difference of values near 1.
    """
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0.0):
        raise DomainError(f"shape a must be finite and positive, got {a!r}")
    if not (isinstance(p, (int, float)) and 0.0 <= p < 1.0):
        raise DomainError(f"probability must lie in [0, 1), got {p!r}")
    if p == 0.0:
        return 0.0
    upper = p > 0.5
    q = 1.0 - p

    # Wilson-Hilferty start, with a power-law fallback deep in the lower tail
    z = norm_quantile(p)
    t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * math.sqrt(a))
    if t > 0.0:
        x = a * t ** 3
    else:
        x = math.exp((math.log(p) + math.lgamma(a) + math.log(a)) / a)
    if x <= 0.0 or not math.isfinite(x):
        x = a

    lo = 0.0
    hi = max(2.0 * x, a + 20.0 * math.sqrt(a) + 20.0)
    for _ in range(300):
        if gammainc_p(a, hi) >= p:
            break
        lo = hi
        hi *= 2.0
    if not (lo < x < hi):
        x = 0.5 * (lo + hi)

    for _ in range(200):
        if upper:
            f = gammainc_q(a, x) - q
            grow = -f  # sign of P(x) - p
        else:
            f = gammainc_p(a, x) - p
            grow = f
        if grow > 0.0:
            hi = x
        elif grow < 0.0:
            lo = x
        else:
            return x
        d = gamma_density_reg(a, x)
        if d > 0.0 and math.isfinite(d):
            step = f / d if not upper else -f / d
            xn = x - step
            if not (lo < xn < hi):
                xn = 0.5 * (lo + hi)
        else:
            xn = 0.5 * (lo + hi)
        if xn == x or abs(xn - x) <= 4.0 * _EPS * abs(xn):
            return xn
        x = xn
    return x


# ----------------------------------------------------------------- beta ----

def _check_beta_shapes(a, b):
    ok = (isinstance(a, (int, float)) and math.isfinite(a) and a > 0.0
          and isinstance(b, (int, float)) and math.isfinite(b) and b > 0.0)
    if not ok:
        raise DomainError(f"beta shapes must be finite and positive, got {a!r}, {b!r}")


def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    _check_beta_shapes(a, b)
    if not (isinstance(x, (int, float)) and 0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x >= (a + 1.0) / (a + b + 2.0):
        a2, b2, x2 = b, a, 1.0 - x
        flipped = True
    else:
        a2, b2, x2 = a, b, x
        flipped = False
    if x2 == 0.0:
        val = 0.0
    else:
        ln_front = (math.lgamma(a2 + b2) - math.lgamma(a2) - math.lgamma(b2)
                    + a2 * math.log(x2) + b2 * math.log1p(-x2))
        val = math.exp(ln_front) * _beta_cf(a2, b2, x2) / a2
    return 1.0 - val if flipped else val


def beta_density_reg(a: float, b: float, x: float) -> float:
    """dI/dx = x^(a-1) (1-x)^(b-1) / B(a, b)."""
    _check_beta_shapes(a, b)
    if not (isinstance(x, (int, float)) and 0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        shape = a if x == 0.0 else b
        if shape < 1.0:
            return math.inf
        if shape > 1.0:
            return 0.0
        # fall through: linear edge, finite positive value
    lnb = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    if x == 0.0:
        return math.exp(lnb + (b - 1.0) * math.log1p(-x))
    if x == 1.0:
        return math.exp(lnb + (a - 1.0) * math.log(x))
    return math.exp(lnb + (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x))


def _betainc_inv_low(a: float, b: float, p: float) -> float:
    # p <= 0.5; solve I_x(a, b) = p with a bracketed Newton iteration
    tail = math.exp((math.log(p) + math.lgamma(a + 1.0) + math.lgamma(b)
                     - math.lgamma(a + b)) / a) if p > 0.0 else 0.0
    mean = a / (a + b)
    x = tail if 0.0 < tail < mean else mean
    lo, hi = 0.0, 1.0
    for _ in range(300):
        f = betainc(a, b, x) - p
        if f > 0.0:
            hi = x
        elif f < 0.0:
            lo = x
        else:
            return x
        d = beta_density_reg(a, b, x)
        if d > 0.0 and math.isfinite(d):
            xn = x - f / d
            if not (lo < xn < hi):
                xn = 0.5 * (lo + hi)
        else:
            xn = 0.5 * (lo + hi)
        if xn == x or abs(xn - x) <= 4.0 * _EPS * abs(xn):
            return xn
        x = xn
    return x


def betainc_inv(a: float, b: float, p: float) -> float:
    """x with I_x(a, b) = p, for p in [0, 1].

    Inverts on whichever side of the symmetry keeps the target probability
    at or below one half, so tail quantiles stay fully conditioned.
    """
    _check_beta_shapes(a, b)
    if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    if p > 0.5:
        return 1.0 - _betainc_inv_low(b, a, 1.0 - p)
    return _betainc_inv_low(a, b, p)

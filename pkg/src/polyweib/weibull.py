"""The basis-generating Weibull distribution W(lambda, k).

Its quantile z(u) = lambda * (-ln(1-u))^(1/k) supplies the basis variable for
the polynomial quantile models; powers z^i form the design rows.
"""

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .errors import DomainError


@dataclass(frozen=True)
class WeibullBase:
    """Scale/shape pair of the basis distribution. Defaults to W(1, 4);
    the heavy-tail variant used for Student-t targets is W(1, 6)."""

    lam: float = 1.0
    k: float = 4.0

    def __post_init__(self):
        lam, k = float(self.lam), float(self.k)
        if not (math.isfinite(lam) and lam > 0.0):
            raise DomainError(f"scale lambda must be finite and positive, got {self.lam!r}")
        if not (math.isfinite(k) and k > 0.0):
            raise DomainError(f"shape k must be finite and positive, got {self.k!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "k", k)


def _check_u(u: float):
    if not (isinstance(u, (int, float)) and math.isfinite(u)):
        raise DomainError(f"probability must be a finite real, got {u!r}")
    if u < 0.0 or u >= 1.0:
        raise DomainError(f"probability must lie in [0, 1), got {u!r}")


def quantile_z(base: WeibullBase, u: float) -> float:
    """z(u) = lambda * (-ln(1-u))^(1/k), using log1p for small u."""
    _check_u(u)
    t = -math.log1p(-u)
    return base.lam * t ** (1.0 / base.k)


def quantile_z_array(base: WeibullBase, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0) or np.any(u >= 1.0) or not np.isfinite(u).all():
        raise DomainError("probabilities must lie in [0, 1)")
    return base.lam * (-np.log1p(-u)) ** (1.0 / base.k)


def quantile_z_mp(base: WeibullBase, u):
    """Extended-precision z(u); u is an mpmath scalar under the caller's precision."""
    return mp.mpf(base.lam) * (-mp.log1p(-u)) ** (1 / mp.mpf(base.k))


def cdf_z(base: WeibullBase, z: float) -> float:
    """W(z) = 1 - exp(-(z/lambda)^k)."""
    if not (isinstance(z, (int, float)) and math.isfinite(z)) or z < 0.0:
        raise DomainError(f"z must be finite and nonnegative, got {z!r}")
    return -math.expm1(-((z / base.lam) ** base.k))


def pdf_z(base: WeibullBase, z: float) -> float:
    """w(z) = (k/lambda) * (z/lambda)^(k-1) * exp(-(z/lambda)^k)."""
    if not (isinstance(z, (int, float)) and math.isfinite(z)) or z < 0.0:
        raise DomainError(f"z must be finite and nonnegative, got {z!r}")
    s = z / base.lam
    if s == 0.0:
        if base.k > 1.0:
            return 0.0
        if base.k == 1.0:
            return 1.0 / base.lam
        return math.inf
    return (base.k / base.lam) * s ** (base.k - 1.0) * math.exp(-(s ** base.k))


def basis_vector(base: WeibullBase, u: float, degree: int) -> np.ndarray:
    """Powers (1, z, z^2, ..., z^degree) at z = z(u)."""
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {degree!r}")
    z = quantile_z(base, u)
    out = np.empty(degree + 1)
    out[0] = 1.0
    for i in range(1, degree + 1):
        out[i] = out[i - 1] * z
    return out

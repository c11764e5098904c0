"""Reference distributions: ground-truth quantile / CDF / PDF / sampling.

These are the fit targets and audit oracles. The set covers normal,
lognormal, gamma, beta, Rayleigh, chi-square, Student t, the
normal-plus-shifted-Bernoulli mixture used for data-fit experiments, and the
identity target ``weibull-self`` (the basis distribution itself).

The CLI spec grammar is ``name(p1=v1,p2=v2)``, e.g. ``gamma(a=10,b=1)``,
``t(nu=5)``, ``mixture(a=2.4,p=0.5)``.
"""

import math
import re
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from . import special
from .errors import DomainError, InputError, UnsupportedOperationError
from .weibull import WeibullBase, quantile_z, quantile_z_mp

_ALIASES = {
    "normal": "normal",
    "gaussian": "normal",
    "lognormal": "lognormal",
    "gamma": "gamma",
    "beta": "beta",
    "rayleigh": "rayleigh",
    "chisquare": "chisquare",
    "chi2": "chisquare",
    "t": "student_t",
    "student_t": "student_t",
    "mixture": "normal_bernoulli_mixture",
    "normal_bernoulli_mixture": "normal_bernoulli_mixture",
    "weibull_self": "weibull_self",
}

# parameter name -> (required, default)
_PARAMS = {
    "normal": {"mu": (False, 0.0), "sigma": (False, 1.0)},
    "lognormal": {"mu": (False, 0.0), "sigma": (False, 1.0)},
    "gamma": {"a": (True, None), "b": (True, None)},
    "beta": {"a": (True, None), "b": (True, None)},
    "rayleigh": {"nu": (True, None)},
    "chisquare": {"nu": (True, None)},
    "student_t": {"nu": (True, None)},
    "normal_bernoulli_mixture": {"a": (False, 2.4), "p": (False, 0.5)},
    "weibull_self": {"lam": (False, None), "k": (False, None)},
}


@dataclass(frozen=True)
class ReferenceDistribution:
    """A named distribution with validated parameters."""

    id: str
    params: tuple  # sorted (name, value) pairs

    def param(self, name: str) -> float:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    def spec(self) -> str:
        if not self.params:
            return self.id
        inner = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.id}({inner})"


def make_distribution(name: str, **params) -> ReferenceDistribution:
    key = _ALIASES.get(name.strip().lower().replace("-", "_"))
    if key is None:
        raise InputError(f"unknown distribution {name!r}")
    schema = _PARAMS[key]
    resolved = {}
    for pname, (required, default) in schema.items():
        if pname in params:
            value = params.pop(pname)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InputError(f"parameter {pname!r} of {key} must be a number")
            if not math.isfinite(value):
                raise DomainError(f"parameter {pname!r} of {key} must be finite")
            resolved[pname] = value
        elif required:
            raise InputError(f"distribution {key} requires parameter {pname!r}")
        elif default is not None:
            resolved[pname] = float(default)
    if params:
        extra = ", ".join(sorted(params))
        raise InputError(f"unknown parameter(s) for {key}: {extra}")
    _validate_params(key, resolved)
    return ReferenceDistribution(key, tuple(sorted(resolved.items())))


def _validate_params(key: str, p: dict):
    def positive(name):
        if name in p and not p[name] > 0.0:
            raise DomainError(f"parameter {name!r} of {key} must be positive")

    if key in ("normal", "lognormal"):
        positive("sigma")
    elif key in ("gamma", "beta"):
        positive("a")
        positive("b")
    elif key in ("rayleigh", "chisquare", "student_t"):
        positive("nu")
    elif key == "normal_bernoulli_mixture":
        if not 0.0 < p["p"] < 1.0:
            raise DomainError("mixture weight p must lie in (0, 1)")
    elif key == "weibull_self":
        positive("lam")
        positive("k")


_SPEC_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_\-]*)\s*(?:\(\s*(.*?)\s*\))?\s*$")


def parse_spec(text: str) -> ReferenceDistribution:
    """Parse ``name(p1=v1,p2=v2)`` or a bare ``name``."""
    if not isinstance(text, str):
        raise InputError("distribution spec must be a string")
    match = _SPEC_RE.match(text)
    if not match:
        raise InputError(f"cannot parse distribution spec {text!r}")
    name, argtext = match.group(1), match.group(2)
    params = {}
    if argtext:
        for piece in argtext.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise InputError(f"expected name=value in spec, got {piece!r}")
            pname, pval = piece.split("=", 1)
            try:
                params[pname.strip()] = float(pval)
            except ValueError:
                raise InputError(f"parameter value {pval.strip()!r} is not a number")
    return make_distribution(name, **params)


def _check_open_unit(u):
    if not (isinstance(u, (int, float)) and 0.0 < u < 1.0):
        raise DomainError(f"probability must lie in (0, 1), got {u!r}")


def _student_t_quantile(nu: float, u: float) -> float:
    if u == 0.5:
        return 0.0
    sign = 1.0 if u > 0.5 else -1.0
    umin = min(u, 1.0 - u)
    if umin <= 0.25:
        x = special.betainc_inv(0.5 * nu, 0.5, 2.0 * umin)
        t = math.sqrt(nu * (1.0 - x) / x)
    else:
        y = special.betainc_inv(0.5, 0.5 * nu, abs(2.0 * u - 1.0))
        t = math.sqrt(nu * y / (1.0 - y))
    return sign * t


def ref_quantile(dist: ReferenceDistribution, u: float) -> float:
    """Exact inverse CDF; not available for the mixture."""
    _check_open_unit(u)
    key = dist.id
    if key == "normal":
        return dist.param("mu") + dist.param("sigma") * special.norm_quantile(u)
    if key == "lognormal":
        return math.exp(dist.param("mu") + dist.param("sigma") * special.norm_quantile(u))
    if key == "gamma":
        return dist.param("b") * special.gammainc_inv(dist.param("a"), u)
    if key == "beta":
        return special.betainc_inv(dist.param("a"), dist.param("b"), u)
    if key == "rayleigh":
        return dist.param("nu") * math.sqrt(-2.0 * math.log1p(-u))
    if key == "chisquare":
        return 2.0 * special.gammainc_inv(0.5 * dist.param("nu"), u)
    if key == "student_t":
        return _student_t_quantile(dist.param("nu"), u)
    if key == "weibull_self":
        base = _self_base(dist)
        return quantile_z(base, u)
    raise UnsupportedOperationError(
        "the mixture has no closed-form quantile; fit it from samples instead")


def _self_base(dist: ReferenceDistribution) -> WeibullBase:
    try:
        lam = dist.param("lam")
    except KeyError:
        lam = 1.0
    try:
        k = dist.param("k")
    except KeyError:
        k = 4.0
    return WeibullBase(lam, k)


def ref_cdf(dist: ReferenceDistribution, x: float) -> float:
    key = dist.id
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if key == "normal":
        return special.norm_cdf((x - dist.param("mu")) / dist.param("sigma"))
    if key == "lognormal":
        if x <= 0.0:
            raise DomainError("lognormal support is x > 0")
        return special.norm_cdf((math.log(x) - dist.param("mu")) / dist.param("sigma"))
    if key == "gamma":
        if x < 0.0:
            raise DomainError("gamma support is x >= 0")
        return special.gammainc_p(dist.param("a"), x / dist.param("b"))
    if key == "beta":
        if not 0.0 <= x <= 1.0:
            raise DomainError("beta support is [0, 1]")
        return special.betainc(dist.param("a"), dist.param("b"), x)
    if key == "rayleigh":
        if x < 0.0:
            raise DomainError("rayleigh support is x >= 0")
        nu = dist.param("nu")
        return -math.expm1(-0.5 * (x / nu) ** 2)
    if key == "chisquare":
        if x < 0.0:
            raise DomainError("chi-square support is x >= 0")
        return special.gammainc_p(0.5 * dist.param("nu"), 0.5 * x)
    if key == "student_t":
        nu = dist.param("nu")
        if x == 0.0:
            return 0.5
        w = nu / (nu + x * x)
        half_tail = 0.5 * special.betainc(0.5 * nu, 0.5, w)
        return 1.0 - half_tail if x > 0.0 else half_tail
    if key == "weibull_self":
        if x < 0.0:
            raise DomainError("weibull support is x >= 0")
        base = _self_base(dist)
        return -math.expm1(-((x / base.lam) ** base.k))
    # mixture
    a, p = dist.param("a"), dist.param("p")
    return (1.0 - p) * special.norm_cdf(x) + p * special.norm_cdf(x - a)


def ref_pdf(dist: ReferenceDistribution, x: float) -> float:
    key = dist.id
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if key == "normal":
        sigma = dist.param("sigma")
        return special.norm_pdf((x - dist.param("mu")) / sigma) / sigma
    if key == "lognormal":
        if x <= 0.0:
            raise DomainError("lognormal support is x > 0")
        sigma = dist.param("sigma")
        return special.norm_pdf((math.log(x) - dist.param("mu")) / sigma) / (sigma * x)
    if key == "gamma":
        if x < 0.0:
            raise DomainError("gamma support is x >= 0")
        b = dist.param("b")
        return special.gamma_density_reg(dist.param("a"), x / b) / b
    if key == "beta":
        if not 0.0 <= x <= 1.0:
            raise DomainError("beta support is [0, 1]")
        return special.beta_density_reg(dist.param("a"), dist.param("b"), x)
    if key == "rayleigh":
        if x < 0.0:
            raise DomainError("rayleigh support is x >= 0")
        nu = dist.param("nu")
        return (x / nu ** 2) * math.exp(-0.5 * (x / nu) ** 2)
    if key == "chisquare":
        if x < 0.0:
            raise DomainError("chi-square support is x >= 0")
        return 0.5 * special.gamma_density_reg(0.5 * dist.param("nu"), 0.5 * x)
    if key == "student_t":
        nu = dist.param("nu")
        ln_norm = (math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu)
                   - 0.5 * math.log(nu * math.pi))
        return math.exp(ln_norm - 0.5 * (nu + 1.0) * math.log1p(x * x / nu))
    if key == "weibull_self":
        if x < 0.0:
            raise DomainError("weibull support is x >= 0")
        base = _self_base(dist)
        from .weibull import pdf_z
        return pdf_z(base, x)
    a, p = dist.param("a"), dist.param("p")
    return (1.0 - p) * special.norm_pdf(x) + p * special.norm_pdf(x - a)


def ref_sample(dist: ReferenceDistribution, n: int, seed=None) -> np.ndarray:
    """Seeded, deterministic sampling. The mixture is drawn as
    x_c + a*x_d with x_c standard normal and x_d Bernoulli(p)."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise DomainError(f"sample count must be a nonnegative integer, got {n!r}")
    rng = np.random.default_rng(seed)
    key = dist.id
    if key == "normal":
        return dist.param("mu") + dist.param("sigma") * rng.standard_normal(n)
    if key == "lognormal":
        return np.exp(dist.param("mu") + dist.param("sigma") * rng.standard_normal(n))
    if key == "gamma":
        return rng.gamma(shape=dist.param("a"), scale=dist.param("b"), size=n)
    if key == "beta":
        return rng.beta(dist.param("a"), dist.param("b"), size=n)
    if key == "rayleigh":
        return rng.rayleigh(scale=dist.param("nu"), size=n)
    if key == "chisquare":
        return rng.chisquare(dist.param("nu"), size=n)
    if key == "student_t":
        return rng.standard_t(dist.param("nu"), size=n)
    if key == "weibull_self":
        base = _self_base(dist)
        return base.lam * rng.weibull(base.k, size=n)
    a, p = dist.param("a"), dist.param("p")
    return rng.standard_normal(n) + a * (rng.random(n) < p)


def quantile_target(dist: ReferenceDistribution, base: WeibullBase = None):
    """A u -> x callable for fitting.

    Targets whose quantile has a closed form additionally carry a
    ``quantile_mp`` attribute evaluating the same quantile in the caller's
    mpmath working precision; the fit engine uses it to keep the right-hand
    side exact when the target lies inside the polynomial basis.
    """
    if dist.id == "normal_bernoulli_mixture":
        raise UnsupportedOperationError(
            "the mixture has no closed-form quantile to fit against")

    if dist.id == "weibull_self":
        self_base = base if (base is not None and not dist.params) else _self_base(dist)

        def target(u):
            return quantile_z(self_base, u)

        target.quantile_mp = lambda u: quantile_z_mp(self_base, u)
        target.label = "weibull_self"
        return target

    def target(u):
        return ref_quantile(dist, u)

    if dist.id == "rayleigh":
        nu = dist.param("nu")
        target.quantile_mp = lambda u: mp.mpf(nu) * mp.sqrt(-2 * mp.log1p(-u))
    elif dist.id == "gamma" and dist.param("a") == 1.0:
        b = dist.param("b")
        target.quantile_mp = lambda u: -mp.mpf(b) * mp.log1p(-u)
    elif dist.id == "chisquare" and dist.param("nu") == 2.0:
        target.quantile_mp = lambda u: -2 * mp.log1p(-u)
    target.label = dist.id
    return target

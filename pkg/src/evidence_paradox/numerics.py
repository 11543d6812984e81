"""Special functions and probability primitives.

Log-gamma, the normal CDF and the normal quantile are thin validated wrappers
over the standard library (``math.lgamma``, ``math.erfc`` and
``statistics.NormalDist.inv_cdf``, which is Wichura's AS241).  The lower
incomplete gamma function is evaluated here with the usual series /
continued-fraction split, in log space so that the uniform-prior closed forms
stay finite for large counts.

Incomplete-gamma indexing is the standard one::

    lower_incomplete_gamma(s, x) = integral_0^x t**(s - 1) * exp(-t) dt

An integral of the form ``integral_0^a exp(-x) * x**b dx`` is therefore
``lower_incomplete_gamma(b + 1, a)``.
"""

from __future__ import annotations

import math
import sys
from statistics import NormalDist

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min / _EPS
_MAX_ITER = 100_000
_STD_NORMAL = NormalDist()


class DomainError(ValueError):
    """Argument outside the domain of a function."""


def _check_finite(name: str, x: float) -> None:
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    _check_finite("x", x)
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _log_series(s: float, x: float) -> float:
    # log of sum_{n>=0} x**n / (s (s+1) ... (s+n)); converges fast for x < s + 1
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return math.log(total)
    raise ArithmeticError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _log_continued_fraction(s: float, x: float) -> float:
    # log of the modified-Lentz continued fraction for Gamma(s, x) * exp(x) * x**(-s)
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.log(h)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (s={s}, x={x})")


def _check_incomplete_args(s: float, x: float) -> None:
    _check_finite("s", s)
    if s <= 0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s!r}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x!r}")


def log_regularized_lower_gamma(s: float, x: float) -> float:
    """ln P(s, x), where P(s, x) = gamma(s, x) / Gamma(s)."""
    _check_incomplete_args(s, x)
    if x == 0:
        return -math.inf
    if math.isinf(x):
        return 0.0
    log_prefactor = -x + s * math.log(x) - math.lgamma(s)
    if x < s + 1.0:
        return log_prefactor + _log_series(s, x)
    upper = math.exp(log_prefactor + _log_continued_fraction(s, x))
    return math.log1p(-upper)


def regularized_lower_gamma(s: float, x: float) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s), in [0, 1]."""
    return math.exp(log_regularized_lower_gamma(s, x))


def log_lower_incomplete_gamma(s: float, x: float) -> float:
    """ln gamma(s, x) with standard indexing."""
    return log_regularized_lower_gamma(s, x) + math.lgamma(s)


def lower_incomplete_gamma(s: float, x: float) -> float:
    """gamma(s, x) = integral_0^x t**(s-1) exp(-t) dt."""
    return math.exp(log_lower_incomplete_gamma(s, x))


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc (accurate in both tails)."""
    if math.isnan(x):
        raise DomainError("normal_cdf of NaN")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x: float) -> float:
    """Standard normal upper tail 1 - Phi(x)."""
    return normal_cdf(-x)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF for 0 < p < 1."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


def poisson_logpmf(k: int, lam: float) -> float:
    if k < 0 or int(k) != k:
        raise DomainError(f"poisson count must be a nonnegative integer, got {k!r}")
    _check_finite("lambda", lam)
    if lam <= 0:
        raise DomainError(f"poisson mean must be > 0, got {lam!r}")
    return -lam + k * math.log(lam) - math.lgamma(k + 1)


def poisson_pmf(k: int, lam: float) -> float:
    """Pr(nu = k) for nu ~ Poisson(lam), evaluated in log space."""
    return math.exp(poisson_logpmf(k, lam))

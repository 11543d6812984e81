"""Single study type whose successes report a p-value.

A study succeeds when its p-value ``rho`` is at most the publication cutoff
``alpha``.  Under a false hypothesis ``Pr(rho < x) = a(x)`` (the null curve);
under a true hypothesis ``Pr(rho < x) = gamma(x)`` (the power curve).  The
number of studies is Poisson(I) with I ~ Gamma(kappa, beta).  The observed
event is "exactly j successes, all with rho >= p".
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .classical import posterior_from_lr
from .framework import TIE_TOLERANCE, GammaPrior
from .numerics import DomainError, normal_cdf, normal_quantile


def normal_shift_power(x: float, shift: float) -> float:
    """Power to reach p-value below ``x`` when the statistic is shifted by ``shift``.

    Equal to ``1 - Phi(Phi^-1(1 - x) - shift)``; evaluated as
    ``Phi(Phi^-1(x) + shift)`` to keep precision for small ``x``.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    if shift == 0:
        return x
    return normal_cdf(normal_quantile(x) + shift)


def shift_from_design(effect: float, sd: float, n: int) -> float:
    """Mean of the one-sided z statistic under the alternative: effect * sqrt(n) / sd."""
    if not (effect > 0 and sd > 0 and n >= 1):
        raise DomainError("effect, sd and n must all be positive")
    return effect * math.sqrt(n) / sd


@dataclass(frozen=True)
class NormalShiftCurve:
    """gamma(x) for a one-sided normal test whose statistic has mean ``shift``."""

    shift: float

    def __post_init__(self):
        if not (math.isfinite(self.shift) and self.shift >= 0):
            raise DomainError(f"shift must be finite and >= 0, got {self.shift!r}")

    def __call__(self, x: float) -> float:
        return normal_shift_power(x, self.shift)


@dataclass(frozen=True)
class IdentityNull:
    """Exact p-values: a(x) = x."""

    def __call__(self, x: float) -> float:
        return x


@dataclass(frozen=True)
class TableCurve:
    """Piecewise-linear curve through (x, y) points, clamped beyond the ends."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise DomainError("curve table needs at least two (x, y) points")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("curve table x values must be strictly increasing")
        if np.any(np.diff(ys) < 0):
            raise DomainError("curve table y values must be nondecreasing")
        if np.any((xs < 0) | (xs > 1) | (ys < 0) | (ys > 1)):
            raise DomainError("curve table values must lie in [0, 1]")
        object.__setattr__(self, "xs", tuple(xs.tolist()))
        object.__setattr__(self, "ys", tuple(ys.tolist()))

    def __call__(self, x: float) -> float:
        return float(np.interp(x, self.xs, self.ys))

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "TableCurve":
        """Load a two-column CSV with a header row."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise DomainError(f"{path}: need a header row and at least one data row")
        header, body = rows[0], [r for r in rows[1:] if r]
        if len(header) != 2:
            raise DomainError(f"{path}: expected 2 columns, found {len(header)}")
        try:
            float(header[0])
        except ValueError:
            pass
        else:
            raise DomainError(f"{path}: first row must be a header")
        try:
            xs = [float(r[0]) for r in body]
            ys = [float(r[1]) for r in body]
        except (ValueError, IndexError) as exc:
            raise DomainError(f"{path}: malformed row ({exc})") from None
        return cls(tuple(xs), tuple(ys))


PowerCurve = Union[NormalShiftCurve, TableCurve]
NullCurve = Union[IdentityNull, TableCurve]


@dataclass(frozen=True)
class HomogeneousParams:
    alpha: float
    power_curve: PowerCurve
    null_curve: NullCurve = field(default_factory=IdentityNull)
    hypothesis_prior: float = 0.5
    interest: GammaPrior = field(default_factory=lambda: GammaPrior(1.0, 1.0))

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.hypothesis_prior < 1.0:
            raise DomainError("hypothesis_prior must lie in (0, 1)")
        if not isinstance(self.interest, GammaPrior):
            raise TypeError("the p-value framework needs a gamma interest prior")
        if isinstance(self.null_curve, TableCurve):
            null = self.null_curve
            if abs(null(self.alpha) - self.alpha) > 1e-9:
                raise DomainError(f"null curve must satisfy a(alpha) = alpha; a({self.alpha}) = {null(self.alpha)}")
            if any(y > x + 1e-12 for x, y in zip(null.xs, null.ys)):
                raise DomainError("null curve must satisfy a(x) <= x")


def _bands(params: HomogeneousParams, truth: bool, p: float) -> tuple[float, float]:
    # (Pr(p <= rho <= alpha), Pr(success)) per study
    if not 0.0 < p < params.alpha:
        raise DomainError(f"need 0 < p < alpha = {params.alpha}, got p = {p!r}")
    curve = params.power_curve if truth else params.null_curve
    top = curve(params.alpha)
    return top - curve(p), top


def log_homogeneous_observation_probability(params: HomogeneousParams, truth: bool, j: int, p: float) -> float:
    if j < 0:
        raise DomainError(f"j must be nonnegative, got {j!r}")
    band, top = _bands(params, truth, p)
    kappa, beta = params.interest.shape, params.interest.rate
    if band <= 0:
        if j > 0:
            return -math.inf
        return kappa * math.log(beta / (beta + top))
    return (
        kappa * math.log(beta)
        + math.lgamma(j + kappa)
        - math.lgamma(kappa)
        - math.lgamma(j + 1)
        + j * math.log(band)
        - (j + kappa) * math.log(beta + top)
    )


def homogeneous_observation_probability(params: HomogeneousParams, truth: bool, j: int, p: float) -> float:
    """Pr(exactly j successes, all with p-value >= p | truth)."""
    return math.exp(log_homogeneous_observation_probability(params, truth, j, p))


def homogeneous_likelihood_ratio(params: HomogeneousParams, j: int, p: float) -> float:
    """R^T / R^F for the event "exactly j successes, all with p-value >= p"."""
    return math.exp(
        log_homogeneous_observation_probability(params, True, j, p)
        - log_homogeneous_observation_probability(params, False, j, p)
    )


def homogeneous_posterior(params: HomogeneousParams, j: int, p: float) -> float:
    return posterior_from_lr(params.hypothesis_prior, homogeneous_likelihood_ratio(params, j, p))


def homogeneous_is_paradoxical(params: HomogeneousParams, p: float) -> bool:
    """True iff every further success with p-value in [p, alpha] lowers Pr(H)."""
    step = math.log(homogeneous_likelihood_ratio(params, 1, p)) - math.log(homogeneous_likelihood_ratio(params, 0, p))
    return step < -TIE_TOLERANCE


@dataclass(frozen=True)
class HomogeneousThreshold:
    """Rate bound for the p-value paradox.

    ``threshold`` uses the configured null curve a(p) and is exact: the
    paradox holds iff ``beta < threshold`` (``inf`` means for every beta, a
    nonpositive value means for no beta).  ``sufficient_threshold`` replaces
    a(p) by p; it never exceeds ``threshold`` and coincides with it for
    exact p-values.
    """

    gamma_alpha: float
    gamma_p: float
    null_p: float
    threshold: float
    sufficient_threshold: float
    ratio_condition: bool

    @property
    def paradox_possible(self) -> bool:
        return self.threshold > 0


def _rate_bound(alpha: float, null_p: float, g_alpha: float, g_p: float) -> float:
    # paradox iff (alpha - a_p)(beta + g_alpha) > (g_alpha - g_p)(beta + alpha)
    #         iff beta * (band_true - band_false) < alpha*g_p - a_p*g_alpha
    numerator = alpha * g_p - null_p * g_alpha
    denominator = (g_alpha - g_p) - (alpha - null_p)
    if denominator > 0:
        return numerator / denominator
    if numerator > 0:
        return math.inf
    if denominator == 0:
        return 0.0
    raise DomainError(
        "with these curves the paradox appears only for large beta; "
        "use homogeneous_is_paradoxical for a direct check"
    )


def homogeneous_paradox_threshold(
    alpha: float, p: float, power_curve: PowerCurve, null_curve: NullCurve = IdentityNull()
) -> HomogeneousThreshold:
    """Largest gamma rate beta (exclusive) for which the p-value paradox occurs."""
    if not 0.0 < p < alpha < 1.0:
        raise DomainError(f"need 0 < p < alpha < 1, got p={p!r}, alpha={alpha!r}")
    g_alpha, g_p = power_curve(alpha), power_curve(p)
    if g_alpha < alpha:
        raise DomainError(f"power at alpha ({g_alpha:.6g}) is below alpha; the study is not informative")
    null_p = null_curve(p)
    ratio_condition = g_alpha > alpha and g_p / p > g_alpha / alpha
    return HomogeneousThreshold(
        gamma_alpha=g_alpha,
        gamma_p=g_p,
        null_p=null_p,
        threshold=_rate_bound(alpha, null_p, g_alpha, g_p),
        sufficient_threshold=_rate_bound(alpha, p, g_alpha, g_p),
        ratio_condition=ratio_condition,
    )


def ratio_monotonicity_check(shift: float, alpha: float, grid: Sequence[float]) -> bool:
    """True iff gamma(p)/p > gamma(alpha)/alpha at every grid point p < alpha."""
    curve = NormalShiftCurve(shift)
    ref = curve(alpha) / alpha
    for p in grid:
        if not 0.0 < p < alpha:
            raise DomainError(f"grid points must lie in (0, alpha), got {p!r}")
        if not curve(p) / p > ref:
            return False
    return True

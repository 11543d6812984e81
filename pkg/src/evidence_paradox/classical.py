"""Positive predictive value for identical studies, with and without publication bias."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import DomainError


@dataclass(frozen=True)
class ErrorRates:
    """False-positive rate ``alpha`` and power of one study design."""

    alpha: float
    power: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.power <= 1.0:
            raise DomainError(f"power must lie in (0, 1], got {self.power!r}")

    @property
    def informative(self) -> bool:
        return self.power > self.alpha

    @property
    def likelihood_ratio(self) -> float:
        return self.power / self.alpha


def likelihood_ratio_single(rates: ErrorRates) -> float:
    """Likelihood ratio of one observed success."""
    return rates.power / rates.alpha


def posterior_from_lr(prior: float, lr: float) -> float:
    """Convert a prior and a likelihood ratio into Pr(H | evidence)."""
    if not 0.0 < prior < 1.0:
        raise DomainError(f"prior must lie strictly inside (0, 1), got {prior!r}")
    if not lr > 0:
        raise DomainError(f"likelihood ratio must be positive, got {lr!r}")
    if math.isinf(lr):
        return 1.0
    return prior / (prior + (1.0 - prior) / lr)


def likelihood_ratio_at_least_one(rates: ErrorRates, n: int) -> float:
    """Likelihood ratio of seeing at least one success when ``n`` studies ran."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    # 1 - (1 - x)**n without cancellation for small x
    hit_true = -math.expm1(n * math.log1p(-rates.power)) if rates.power < 1 else 1.0
    hit_false = -math.expm1(n * math.log1p(-rates.alpha))
    return hit_true / hit_false


def likelihood_ratio_exactly_j(rates: ErrorRates, n: int, j: int) -> float:
    """Likelihood ratio of seeing exactly ``j`` of ``n`` studies succeed."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not 0 <= j <= n:
        raise DomainError(f"j must lie in [0, {n}], got {j!r}")
    if rates.power == 1.0:
        return math.inf if j == n else 0.0
    log_lr = j * math.log(rates.power / rates.alpha) + (n - j) * (
        math.log1p(-rates.power) - math.log1p(-rates.alpha)
    )
    return math.exp(log_lr)

"""Interest-level observation framework with weak and strong studies.

An interest level ``I`` is drawn from a prior.  Given ``I``, the number of
weak and strong studies attempted are independent Poisson counts with means
``c_w * I`` and ``I``.  The hypothesis is true with probability
``hypothesis_prior``.  Each study succeeds independently with its power (true
hypothesis) or its false-positive rate (false hypothesis), and only successes
are observed.

By Poisson thinning, given ``I`` the observed weak and strong successes are
independent Poisson counts with means ``c_w * r_w * I`` and ``r_s * I``, where
``r`` is the power or the false-positive rate.  Every probability below is a
mixture of such Poisson laws over the interest prior, and all of them reduce
to one moment integral::

    M(N, R) = E[I**N * exp(-R * I)]

which is ``beta**kappa * Gamma(N + kappa) / (Gamma(kappa) * (beta + R)**(N + kappa))``
for a Gamma(kappa, beta) prior and ``gamma(N + 1, R*C) / (C * R**(N + 1))`` for
a Uniform(0, C) prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

from .classical import ErrorRates, posterior_from_lr
from .numerics import DomainError, log_lower_incomplete_gamma

# log-likelihood-ratio differences this small count as ties
TIE_TOLERANCE = 1e-14

AT_LEAST_ONE = ">=1"
ANY = "any"


class StrengthOrderingError(DomainError):
    """The weak/strong ordering gamma_S/alpha_S > gamma_w/alpha_w > 1 is violated."""


class PriorMismatchError(TypeError):
    """An operation was called with an interest prior it does not support."""


@dataclass(frozen=True)
class GammaPrior:
    shape: float
    rate: float

    def __post_init__(self):
        for name in ("shape", "rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"gamma prior {name} must be positive and finite, got {value!r}")

    def log_moment(self, n: int, total_rate: float) -> float:
        """ln E[I**n exp(-total_rate * I)]."""
        kappa, beta = self.shape, self.rate
        return (
            kappa * math.log(beta)
            + math.lgamma(n + kappa)
            - math.lgamma(kappa)
            - (n + kappa) * math.log(beta + total_rate)
        )


@dataclass(frozen=True)
class UniformPrior:
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.upper) and self.upper > 0):
            raise DomainError(f"uniform prior upper bound must be positive and finite, got {self.upper!r}")

    def log_moment(self, n: int, total_rate: float) -> float:
        """ln E[I**n exp(-total_rate * I)]."""
        c = self.upper
        return (
            log_lower_incomplete_gamma(n + 1, total_rate * c)
            - math.log(c)
            - (n + 1) * math.log(total_rate)
        )


InterestPrior = Union[GammaPrior, UniformPrior]


def check_strength_ordering(weak: ErrorRates, strong: ErrorRates) -> None:
    """Raise StrengthOrderingError unless gamma_S/alpha_S > gamma_w/alpha_w > 1."""
    lr_weak = weak.power / weak.alpha
    lr_strong = strong.power / strong.alpha
    if not lr_strong > lr_weak > 1.0:
        raise StrengthOrderingError(
            "study types must satisfy gamma_S/alpha_S > gamma_w/alpha_w > 1 "
            f"(the strength ordering); got strong {lr_strong:.6g}, weak {lr_weak:.6g}"
        )


@dataclass(frozen=True)
class FrameworkParams:
    """Full parameter set of the weak/strong observation framework.

    ``enforce_ordering=False`` skips the strength-ordering check; it exists
    for uninformative test fixtures where power equals alpha.
    """

    weak: ErrorRates
    strong: ErrorRates
    weak_rate_multiplier: float = 1.0
    hypothesis_prior: float = 0.5
    interest: InterestPrior = field(default_factory=lambda: GammaPrior(1.0, 1.0))
    enforce_ordering: bool = True

    def __post_init__(self):
        cw = self.weak_rate_multiplier
        if not (math.isfinite(cw) and cw > 0):
            raise DomainError(f"weak_rate_multiplier must be positive, got {cw!r}")
        if not 0.0 < self.hypothesis_prior < 1.0:
            raise DomainError(f"hypothesis_prior must lie in (0, 1), got {self.hypothesis_prior!r}")
        if self.enforce_ordering:
            check_strength_ordering(self.weak, self.strong)

    def success_rates(self, truth: bool) -> tuple[float, float]:
        """Per-unit-interest Poisson rates of observed (weak, strong) successes."""
        if truth:
            return self.weak_rate_multiplier * self.weak.power, self.strong.power
        return self.weak_rate_multiplier * self.weak.alpha, self.strong.alpha

    def with_interest(self, interest: InterestPrior) -> "FrameworkParams":
        return replace(self, interest=interest)

    def with_prior(self, hypothesis_prior: float) -> "FrameworkParams":
        return replace(self, hypothesis_prior=hypothesis_prior)


@dataclass(frozen=True)
class Observation:
    weak_successes: int
    strong_successes: int

    def __post_init__(self):
        if self.weak_successes < 0 or self.strong_successes < 0:
            raise DomainError("observation counts must be nonnegative")


@dataclass(frozen=True)
class CountEvent:
    """Event on the observed counts; each side is an int, AT_LEAST_ONE or ANY."""

    weak: Union[int, str]
    strong: Union[int, str]

    def __post_init__(self):
        for side in (self.weak, self.strong):
            if isinstance(side, str):
                if side not in (AT_LEAST_ONE, ANY):
                    raise DomainError(f"unknown count event {side!r}")
            elif int(side) != side or side < 0:
                raise DomainError(f"exact count must be a nonnegative integer, got {side!r}")


def _check_counts(j: int, k: int) -> None:
    if j < 0 or k < 0 or int(j) != j or int(k) != k:
        raise DomainError(f"counts must be nonnegative integers, got j={j!r}, k={k!r}")


def _log_mixed_poisson(prior: InterestPrior, counts, rates) -> float:
    """ln E[prod_i Poisson(counts[i]; rates[i] * I)] over the interest prior."""
    total = sum(counts)
    log_weights = sum(n * math.log(r) - math.lgamma(n + 1) for n, r in zip(counts, rates))
    return log_weights + prior.log_moment(total, sum(rates))


def log_observation_probability(params: FrameworkParams, truth: bool, j: int, k: int) -> float:
    _check_counts(j, k)
    rate_w, rate_s = params.success_rates(truth)
    return _log_mixed_poisson(params.interest, (j, k), (rate_w, rate_s))


def observation_probability(params: FrameworkParams, truth: bool, j: int, k: int) -> float:
    """Pr(exactly j weak and k strong successes observed | truth)."""
    return math.exp(log_observation_probability(params, truth, j, k))


def log_likelihood_ratio(params: FrameworkParams, j: int, k: int) -> float:
    _check_counts(j, k)
    weak, strong = params.weak, params.strong
    log_lr = j * math.log(weak.power / weak.alpha) + k * math.log(strong.power / strong.alpha)
    rate_true = sum(params.success_rates(True))
    rate_false = sum(params.success_rates(False))
    prior = params.interest
    n = j + k
    if isinstance(prior, GammaPrior):
        beta = prior.rate
        return log_lr + (n + prior.shape) * math.log((beta + rate_false) / (beta + rate_true))
    c = prior.upper
    return (
        log_lr
        + (n + 1) * math.log(rate_false / rate_true)
        + log_lower_incomplete_gamma(n + 1, c * rate_true)
        - log_lower_incomplete_gamma(n + 1, c * rate_false)
    )


def likelihood_ratio(params: FrameworkParams, j: int, k: int) -> float:
    """Q^T_{j,k} / Q^F_{j,k}."""
    return math.exp(log_likelihood_ratio(params, j, k))


def posterior(params: FrameworkParams, j: int, k: int) -> float:
    """Pr(H | exactly j weak and k strong successes)."""
    return posterior_from_lr(params.hypothesis_prior, likelihood_ratio(params, j, k))


def paradox_rate_threshold(weak: ErrorRates, strong: ErrorRates) -> float:
    """Largest gamma-prior rate beta (exclusive) giving the paradox.

    Every extra weak success lowers the posterior iff
    ``beta < (gamma_S*alpha_w - gamma_w*alpha_S) / (gamma_w - alpha_w)``.
    """
    check_strength_ordering(weak, strong)
    return (strong.power * weak.alpha - weak.power * strong.alpha) / (weak.power - weak.alpha)


def _require_gamma(params: FrameworkParams) -> GammaPrior:
    if not isinstance(params.interest, GammaPrior):
        raise PriorMismatchError(
            "this operation needs a gamma interest prior; "
            "use is_paradoxical_uniform_up_to for a uniform prior"
        )
    return params.interest


def _require_uniform(params: FrameworkParams) -> UniformPrior:
    if not isinstance(params.interest, UniformPrior):
        raise PriorMismatchError("this operation needs a uniform interest prior")
    return params.interest


def weak_step_log_ratio(params: FrameworkParams, j: int, k: int) -> float:
    """ln of LR(j+1, k) / LR(j, k); negative means one more weak success hurts."""
    return log_likelihood_ratio(params, j + 1, k) - log_likelihood_ratio(params, j, k)


def is_paradoxical(params: FrameworkParams) -> bool:
    """True iff the gamma-prior framework shows the improvable evidence paradox.

    For a gamma prior the step ratio LR(j+1,k)/LR(j,k) does not depend on
    (j, k), so the rate threshold is both necessary and sufficient.
    """
    prior = _require_gamma(params)
    return prior.rate < paradox_rate_threshold(params.weak, params.strong)


def _uniform_step_condition(params: FrameworkParams, n: int) -> bool:
    # gamma_w/alpha_w < (a_T/a_F) * g(n+2, C a_F) g(n+1, C a_T) / (g(n+1, C a_F) g(n+2, C a_T))
    c = params.interest.upper
    a_true = sum(params.success_rates(True))
    a_false = sum(params.success_rates(False))
    lhs = math.log(params.weak.power / params.weak.alpha)
    rhs = (
        math.log(a_true / a_false)
        + log_lower_incomplete_gamma(n + 2, c * a_false)
        + log_lower_incomplete_gamma(n + 1, c * a_true)
        - log_lower_incomplete_gamma(n + 1, c * a_false)
        - log_lower_incomplete_gamma(n + 2, c * a_true)
    )
    return rhs - lhs > TIE_TOLERANCE


def is_paradoxical_uniform_up_to(params: FrameworkParams, K: int) -> bool:
    """True iff posterior(j+1, k) < posterior(j, k) for every j + k <= K.

    Under a uniform prior the step ratio depends on (j, k) only through
    ``j + k``, so one condition per total count suffices.
    """
    _require_uniform(params)
    if K < 0:
        raise DomainError(f"K must be nonnegative, got {K!r}")
    return all(_uniform_step_condition(params, n) for n in range(K + 1))


def uniform_paradox_direct(params: FrameworkParams, K: int) -> bool:
    """Same as is_paradoxical_uniform_up_to, by comparing posteriors cell by cell."""
    _require_uniform(params)
    for n in range(K + 1):
        for j in range(n + 1):
            if not weak_step_log_ratio(params, j, n - j) < -TIE_TOLERANCE:
                return False
    return True


def min_uniform_upper_for(
    weak: ErrorRates,
    strong: ErrorRates,
    K: int,
    weak_rate_multiplier: float = 1.0,
    hypothesis_prior: float = 0.5,
    rel_tol: float = 1e-6,
) -> float:
    """Smallest uniform upper bound C giving the paradox up to K.

    C qualifies when the paradox holds at C, 2C and 10C.  The search brackets
    a failing and a qualifying C by halving/doubling and then bisects.
    """
    check_strength_ordering(weak, strong)

    def holds_at(c: float) -> bool:
        params = FrameworkParams(weak, strong, weak_rate_multiplier, hypothesis_prior, UniformPrior(c))
        return is_paradoxical_uniform_up_to(params, K)

    def qualifies(c: float) -> bool:
        return holds_at(c) and holds_at(2 * c) and holds_at(10 * c)

    hi = 1.0
    while not qualifies(hi):
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("no qualifying uniform upper bound below 1e12")
    lo = hi / 2.0
    while qualifies(lo):
        hi = lo
        lo /= 2.0
        if lo < 1e-12:
            return hi
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if qualifies(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _log_one_minus_exp(x: float) -> float:
    # ln(1 - e**x) for x < 0
    return math.log(-math.expm1(x)) if x > -math.log(2) else math.log1p(-math.exp(x))


def _log_diff(log_a: float, log_b: float) -> float:
    # ln(a - b) for a > b > 0
    return log_a + _log_one_minus_exp(log_b - log_a)


def log_aggregate_probability(params: FrameworkParams, truth: bool, event: CountEvent) -> float:
    rate_w, rate_s = params.success_rates(truth)
    prior = params.interest
    w, s = event.weak, event.strong

    def exact(jw, ks):
        # exact counts on the constrained sides; ANY sides are marginalized away
        counts, rates = [], []
        if jw is not None:
            counts.append(jw)
            rates.append(rate_w)
        if ks is not None:
            counts.append(ks)
            rates.append(rate_s)
        if not counts:
            return 0.0
        return _log_mixed_poisson(prior, counts, rates)

    def expand(side):
        # (count or None, needs complement) for one side of the event
        if side == ANY:
            return None, False
        if side == AT_LEAST_ONE:
            return 0, True
        return int(side), False

    jw, w_compl = expand(w)
    ks, s_compl = expand(s)
    if not w_compl and not s_compl:
        return exact(jw, ks)
    if w_compl and not s_compl:
        # Pr(w >= 1, s) = Pr(any w, s) - Pr(w = 0, s)
        return _log_diff(exact(None, ks), exact(0, ks))
    if s_compl and not w_compl:
        return _log_diff(exact(jw, None), exact(jw, 0))
    # both >= 1: 1 - Pr(w=0) - Pr(s=0) + Pr(w=0, s=0)
    p_w0 = math.exp(exact(0, None))
    p_s0 = math.exp(exact(None, 0))
    p_00 = math.exp(exact(0, 0))
    return math.log((1.0 - p_w0) - (p_s0 - p_00))


def aggregate_probability(params: FrameworkParams, truth: bool, event: CountEvent) -> float:
    """Pr(event | truth) for exact, at-least-one and unconstrained count events."""
    return math.exp(log_aggregate_probability(params, truth, event))


_WEAK_ONLY = CountEvent(AT_LEAST_ONE, 0)
_NOTHING = CountEvent(0, 0)


def weak_only_likelihood_ratio(params: FrameworkParams) -> float:
    """Likelihood ratio of seeing some weak successes and no strong success."""
    prior = _require_gamma(params)
    if prior.shape == 1.0:
        beta = prior.rate
        weak, strong, cw = params.weak, params.strong, params.weak_rate_multiplier
        return (
            (weak.power / weak.alpha)
            * (beta + strong.alpha)
            * (beta + strong.alpha + cw * weak.alpha)
            / ((beta + strong.power) * (beta + strong.power + cw * weak.power))
        )
    return math.exp(
        log_aggregate_probability(params, True, _WEAK_ONLY)
        - log_aggregate_probability(params, False, _WEAK_ONLY)
    )


def event_posterior(params: FrameworkParams, event: CountEvent) -> float:
    log_lr = log_aggregate_probability(params, True, event) - log_aggregate_probability(params, False, event)
    return posterior_from_lr(params.hypothesis_prior, math.exp(log_lr))


def general_paradox_check(params: FrameworkParams) -> bool:
    """True iff weak-but-no-strong evidence leaves H less likely than no evidence."""
    log_lr_weak_only = log_aggregate_probability(params, True, _WEAK_ONLY) - log_aggregate_probability(
        params, False, _WEAK_ONLY
    )
    log_lr_nothing = log_likelihood_ratio(params, 0, 0)
    return log_lr_weak_only - log_lr_nothing < -TIE_TOLERANCE

"""Bayesian calculus of improvable evidence under publication bias."""

from .classical import (
    ErrorRates,
    likelihood_ratio_at_least_one,
    likelihood_ratio_exactly_j,
    likelihood_ratio_single,
    posterior_from_lr,
)
from .framework import (
    ANY,
    AT_LEAST_ONE,
    CountEvent,
    FrameworkParams,
    GammaPrior,
    Observation,
    PriorMismatchError,
    StrengthOrderingError,
    UniformPrior,
    aggregate_probability,
    general_paradox_check,
    is_paradoxical,
    is_paradoxical_uniform_up_to,
    likelihood_ratio,
    min_uniform_upper_for,
    observation_probability,
    paradox_rate_threshold,
    posterior,
    weak_only_likelihood_ratio,
)
from .homogeneous import (
    HomogeneousParams,
    IdentityNull,
    NormalShiftCurve,
    TableCurve,
    homogeneous_likelihood_ratio,
    homogeneous_observation_probability,
    homogeneous_paradox_threshold,
    homogeneous_posterior,
    normal_shift_power,
    ratio_monotonicity_check,
    shift_from_design,
)
from .numerics import DomainError

__version__ = "0.1.0"

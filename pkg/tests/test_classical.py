import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evidence_paradox import (
    DomainError,
    ErrorRates,
    likelihood_ratio_at_least_one,
    likelihood_ratio_exactly_j,
    likelihood_ratio_single,
    posterior_from_lr,
)

UNDERPOWERED = ErrorRates(alpha=0.05, power=0.2)


def enumerate_outcomes(rates, n):
    """Probability of each success count under (true, false), by listing all 2**n outcome vectors."""
    true_p = [0.0] * (n + 1)
    false_p = [0.0] * (n + 1)
    for outcome in itertools.product((0, 1), repeat=n):
        j = sum(outcome)
        true_p[j] += math.prod(rates.power if o else 1 - rates.power for o in outcome)
        false_p[j] += math.prod(rates.alpha if o else 1 - rates.alpha for o in outcome)
    return true_p, false_p


def test_single_study_ratio():
    assert likelihood_ratio_single(UNDERPOWERED) == pytest.approx(4.0, rel=1e-15)
    assert likelihood_ratio_single(ErrorRates(0.3, 0.3)) == 1.0
    assert likelihood_ratio_single(ErrorRates(0.01, 0.9)) == pytest.approx(90.0, rel=1e-14)


def test_posterior_worked_examples():
    assert posterior_from_lr(0.2, 4.0) == 0.5
    assert posterior_from_lr(0.1, 4.0) == pytest.approx(4 / 13, rel=1e-15)
    assert posterior_from_lr(0.1, 4.0) == pytest.approx(0.3077, abs=5e-5)


@given(st.floats(1e-6, 1 - 1e-6))
def test_uninformative_evidence_keeps_prior(p):
    assert posterior_from_lr(p, 1.0) == pytest.approx(p, rel=1e-14)


@given(st.floats(1e-6, 1 - 1e-6), st.floats(1e-3, 1e3))
def test_posterior_moves_with_ratio(p, lr):
    post = posterior_from_lr(p, lr)
    if lr > 1:
        assert post > p
    elif lr < 1:
        assert post < p


@pytest.mark.parametrize("prior", [0.0, 1.0, -0.2])
def test_degenerate_prior_rejected(prior):
    with pytest.raises(DomainError):
        posterior_from_lr(prior, 2.0)


def test_at_least_one_of_five():
    lr = likelihood_ratio_at_least_one(UNDERPOWERED, 5)
    assert lr == pytest.approx((1 - 0.8**5) / (1 - 0.95**5), rel=1e-14)
    assert lr == pytest.approx(2.9720, abs=1e-4)
    # 0.2*lr / (0.2*lr + 0.8) = 0.42628 (about 43%)
    assert posterior_from_lr(0.2, lr) == pytest.approx(0.42628, abs=1e-5)
    assert posterior_from_lr(0.1, lr) == pytest.approx(0.2482, abs=1e-4)


def test_at_least_one_reduces_to_single():
    assert likelihood_ratio_at_least_one(UNDERPOWERED, 1) == pytest.approx(4.0, rel=1e-14)


@pytest.mark.parametrize("n", range(1, 11))
def test_at_least_one_by_enumeration(n):
    true_p, false_p = enumerate_outcomes(UNDERPOWERED, n)
    oracle = math.fsum(true_p[1:]) / math.fsum(false_p[1:])
    assert likelihood_ratio_at_least_one(UNDERPOWERED, n) == pytest.approx(oracle, rel=1e-12)


def test_at_least_one_decreases_with_attempts():
    values = [likelihood_ratio_at_least_one(UNDERPOWERED, n) for n in range(1, 51)]
    assert np.all(np.diff(values) < 0)


def test_exactly_one_of_two_by_enumeration():
    true_p, false_p = enumerate_outcomes(UNDERPOWERED, 2)
    oracle = true_p[1] / false_p[1]
    assert oracle == pytest.approx(4 * 0.8 / 0.95, rel=1e-14)
    assert likelihood_ratio_exactly_j(UNDERPOWERED, 2, 1) == pytest.approx(oracle, rel=1e-13)
    assert likelihood_ratio_exactly_j(UNDERPOWERED, 2, 1) == pytest.approx(3.3684, abs=1e-4)


@pytest.mark.parametrize("n", [3, 6, 9])
def test_exactly_j_by_enumeration(n):
    true_p, false_p = enumerate_outcomes(UNDERPOWERED, n)
    for j in range(n + 1):
        assert likelihood_ratio_exactly_j(UNDERPOWERED, n, j) == pytest.approx(true_p[j] / false_p[j], rel=1e-12)


def test_exactly_j_uninformative():
    rates = ErrorRates(0.2, 0.2)
    assert all(likelihood_ratio_exactly_j(rates, 7, j) == pytest.approx(1.0) for j in range(8))


def test_exactly_j_monotone_increasing_for_informative_studies():
    values = [likelihood_ratio_exactly_j(UNDERPOWERED, 5, j) for j in range(6)]
    assert np.all(np.diff(values) > 0)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 40))
def test_exactly_j_monotone_direction(alpha, power, n):
    rates = ErrorRates(alpha, power)
    values = np.array([likelihood_ratio_exactly_j(rates, n, j) for j in range(n + 1)])
    steps = np.diff(np.log(values))
    if power > alpha * (1 + 1e-9):
        assert np.all(steps > 0)
    elif power < alpha * (1 - 1e-9):
        assert np.all(steps < 0)


def test_exactly_j_domain():
    with pytest.raises(DomainError):
        likelihood_ratio_exactly_j(UNDERPOWERED, 3, 4)


@pytest.mark.parametrize("alpha,power", [(0.0, 0.5), (1.0, 0.5), (0.05, 0.0), (0.05, 1.2)])
def test_error_rates_validated(alpha, power):
    with pytest.raises(DomainError):
        ErrorRates(alpha, power)


def test_informative_flag():
    assert UNDERPOWERED.informative
    assert not ErrorRates(0.3, 0.3).informative

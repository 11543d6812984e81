import pytest

from evidence_paradox import ErrorRates, FrameworkParams, GammaPrior

WEAK = ErrorRates(alpha=0.05, power=0.2)
STRONG = ErrorRates(alpha=0.01, power=0.9)


def standard_params(kappa=1.0, beta=0.1, cw=1.0, prior=0.5):
    return FrameworkParams(WEAK, STRONG, cw, prior, GammaPrior(kappa, beta))


@pytest.fixture
def params():
    return standard_params()


@pytest.fixture
def uninformative():
    # power == alpha for both study types; bypasses the strength ordering
    return FrameworkParams(
        ErrorRates(0.1, 0.1), ErrorRates(0.02, 0.02), 1.5, 0.3, GammaPrior(2.0, 0.4), enforce_ordering=False
    )

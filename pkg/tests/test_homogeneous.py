import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evidence_paradox import (
    DomainError,
    GammaPrior,
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
from evidence_paradox.homogeneous import homogeneous_is_paradoxical
from evidence_paradox.simulator import quadrature_homogeneous_probability


def hparams(shift=1.0, alpha=0.05, kappa=1.0, beta=0.1, prior=0.5, null=None):
    return HomogeneousParams(alpha, NormalShiftCurve(shift), null or IdentityNull(), prior, GammaPrior(kappa, beta))


def mp_power(x, shift):
    # upper tail of N(shift, 1) beyond the (1 - x) standard normal quantile, at 40 digits
    with mpmath.workdps(40):
        z = mpmath.sqrt(2) * mpmath.erfinv(1 - 2 * mpmath.mpf(x))
        return float(mpmath.ncdf(shift - z))


def test_zero_shift_is_identity():
    for x in (1e-9, 0.01, 0.3, 0.999):
        assert normal_shift_power(x, 0.0) == x


@pytest.mark.parametrize("x,shift", [(0.05, 1.0), (0.01, 2.5), (1e-6, 4.0), (0.4, 0.3)])
def test_power_against_high_precision(x, shift):
    assert normal_shift_power(x, shift) == pytest.approx(mp_power(x, shift), rel=1e-12)


def test_power_example():
    assert normal_shift_power(0.05, 1.0) == pytest.approx(0.2595, abs=1e-4)


def test_power_tends_to_one():
    assert normal_shift_power(0.05, 12.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.1])
def test_power_domain(x):
    with pytest.raises(DomainError):
        normal_shift_power(x, 1.0)


def test_shift_from_design():
    assert shift_from_design(0.5, 1.0, 16) == 2.0
    assert shift_from_design(0.3, 1.2, 100) == pytest.approx(2.5, rel=1e-15)
    assert shift_from_design(0.5, 1.0, 64) == pytest.approx(2 * shift_from_design(0.5, 1.0, 16))
    with pytest.raises(DomainError):
        shift_from_design(0.0, 1.0, 4)


@pytest.mark.parametrize("shift", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1])
def test_power_exceeds_size_and_ratio_falls(shift, alpha):
    xs = np.geomspace(alpha * 1e-4, alpha, 50)
    ratios = np.array([normal_shift_power(x, shift) / x for x in xs])
    assert np.all(ratios > 1)
    assert np.all(np.diff(ratios) < 0)


def test_uninformative_curve():
    params = hparams(shift=0.0)
    for j, p in itertools.product(range(6), (0.01, 0.03)):
        assert homogeneous_observation_probability(params, True, j, p) == pytest.approx(
            homogeneous_observation_probability(params, False, j, p), rel=1e-14
        )
        assert homogeneous_likelihood_ratio(params, j, p) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("truth", [True, False])
@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_probabilities_sum_to_no_success_below_floor(truth, kappa):
    params = hparams(kappa=kappa, beta=0.3)
    p = 0.02
    below = normal_shift_power(p, 1.0) if truth else p
    total = math.fsum(homogeneous_observation_probability(params, truth, j, p) for j in range(400))
    assert total == pytest.approx((0.3 / (0.3 + below)) ** kappa, rel=1e-10)


@pytest.mark.parametrize("kappa,beta", list(itertools.product([0.5, 1.0, 3.0], [0.05, 0.3, 2.0])))
def test_closed_form_matches_quadrature(kappa, beta):
    alpha = 0.05
    params = hparams(kappa=kappa, beta=beta, alpha=alpha)
    for p in (alpha / 4, alpha / 2, 3 * alpha / 4):
        for truth in (True, False):
            for j in range(6):
                closed = homogeneous_observation_probability(params, truth, j, p)
                assert quadrature_homogeneous_probability(params, truth, j, p) == pytest.approx(closed, rel=1e-8)


def test_empty_observation_ratio():
    params = hparams(kappa=2.0, beta=0.1)
    g = normal_shift_power(0.05, 1.0)
    assert homogeneous_likelihood_ratio(params, 0, 0.02) == pytest.approx(((0.15) / (0.1 + g)) ** 2, rel=1e-13)


def test_step_ratio_constant_in_j():
    params = hparams(beta=0.05, alpha=0.05)
    p = 0.04
    steps = [homogeneous_likelihood_ratio(params, j + 1, p) / homogeneous_likelihood_ratio(params, j, p) for j in range(6)]
    np.testing.assert_allclose(steps, steps[0], rtol=1e-12)


def test_threshold_example():
    result = homogeneous_paradox_threshold(0.05, 0.025, NormalShiftCurve(1.0))
    g_a, g_p = normal_shift_power(0.05, 1.0), normal_shift_power(0.025, 1.0)
    expected = (0.05 * g_p - 0.025 * g_a) / ((g_a - g_p) - 0.025)
    assert result.threshold == pytest.approx(expected, rel=1e-14)
    assert result.threshold == pytest.approx(0.029391, abs=1e-6)
    assert result.sufficient_threshold == result.threshold
    assert result.ratio_condition
    assert result.paradox_possible


def test_zero_shift_has_no_threshold():
    result = homogeneous_paradox_threshold(0.05, 0.025, NormalShiftCurve(0.0))
    assert result.threshold == 0.0
    assert not result.paradox_possible
    assert not result.ratio_condition


@pytest.mark.parametrize("shift,alpha,p", [(1.0, 0.05, 0.025), (0.5, 0.05, 0.04), (2.0, 0.01, 0.002), (1.5, 0.1, 0.05)])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_threshold_biconditional(shift, alpha, p, kappa):
    threshold = homogeneous_paradox_threshold(alpha, p, NormalShiftCurve(shift)).threshold
    assert 0 < threshold < math.inf
    for factor, expect in ((0.5, True), (2.0, False)):
        params = hparams(shift=shift, alpha=alpha, kappa=kappa, beta=factor * threshold)
        assert homogeneous_is_paradoxical(params, p) == expect
        values = [homogeneous_posterior(params, j, p) for j in range(6)]
        assert bool(np.all(np.diff(values) < 0)) == expect
        assert bool(np.all(np.diff(values) > 0)) == (not expect)


def test_null_table_tightens_threshold():
    # a conservative test: Pr(rho < x) = x/2 below alpha/2, linear up to alpha
    null = TableCurve((0.0, 0.025, 0.05, 1.0), (0.0, 0.0125, 0.05, 1.0))
    result = homogeneous_paradox_threshold(0.05, 0.025, NormalShiftCurve(1.0), null)
    assert result.null_p == pytest.approx(0.0125)
    assert result.threshold > result.sufficient_threshold
    for factor, expect in ((0.9, True), (1.1, False)):
        params = hparams(beta=factor * result.threshold, null=null)
        assert homogeneous_is_paradoxical(params, 0.025) == expect


def test_threshold_domain():
    with pytest.raises(DomainError):
        homogeneous_paradox_threshold(0.05, 0.05, NormalShiftCurve(1.0))
    with pytest.raises(DomainError):
        homogeneous_observation_probability(hparams(), True, 0, 0.06)


WITNESS_CASES = list(itertools.product([0.25, 0.5, 1.0, 2.0, 3.0, 5.0], [0.01, 0.05]))


@pytest.mark.parametrize("shift,alpha", WITNESS_CASES)
def test_ratio_witness(shift, alpha):
    assert ratio_monotonicity_check(shift, alpha, np.geomspace(alpha * 1e-6, alpha * 0.999, 50))
    assert ratio_monotonicity_check(shift, alpha, np.linspace(alpha / 50, alpha * 0.98, 50))


def test_ratio_witness_zero_shift_fails():
    assert not ratio_monotonicity_check(0.0, 0.05, [0.01, 0.02])


@given(st.floats(0.05, 6.0), st.floats(1e-4, 0.2), st.floats(0.01, 0.99))
def test_threshold_ratio_condition_holds(shift, alpha, frac):
    assert homogeneous_paradox_threshold(alpha, alpha * frac, NormalShiftCurve(shift)).ratio_condition


def test_table_curve_interpolation_and_clamp():
    curve = TableCurve((0.01, 0.05, 0.1), (0.1, 0.3, 0.5))
    assert curve(0.03) == pytest.approx(0.2)
    assert curve(0.001) == 0.1
    assert curve(0.5) == 0.5


def test_table_curve_csv(tmp_path):
    path = tmp_path / "power.csv"
    path.write_text("x,gamma_x\n0.01,0.1\n0.05,0.3\n0.1,0.5\n")
    assert TableCurve.from_csv(path) == TableCurve((0.01, 0.05, 0.1), (0.1, 0.3, 0.5))


@pytest.mark.parametrize(
    "text",
    ["0.01,0.1\n0.05,0.3\n", "x,y,z\n0.01,0.1,1\n", "x,y\n0.05,0.1\n0.01,0.3\n", "x,y\n0.01,0.4\n0.05,0.3\n", "x,y\n"],
)
def test_table_curve_csv_rejects(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(DomainError):
        TableCurve.from_csv(path)


def test_null_table_must_be_valid():
    with pytest.raises(DomainError):
        hparams(null=TableCurve((0.0, 0.05, 1.0), (0.0, 0.04, 1.0)))
    with pytest.raises(DomainError):
        hparams(null=TableCurve((0.0, 0.02, 0.05, 1.0), (0.0, 0.03, 0.05, 1.0)))


def test_homogeneous_params_need_gamma_prior():
    from evidence_paradox import UniformPrior

    with pytest.raises(TypeError):
        HomogeneousParams(0.05, NormalShiftCurve(1.0), interest=UniformPrior(2.0))

import logging
import math

import mpmath
import numpy as np
import pytest
from scipy.special import eval_genlaguerre, gamma, hyp1f1, loggamma

from specfun import (Accuracy, ContourPlacementError, GammaPoleError, InvalidParameterError,
                     hyper_0f3, hyper_0f3_partial_sums, kummer_1f1, kummer_1f1_deriv,
                     kummer_1f1_ratio, laguerre, log_gamma_complex, meijer_g40_04,
                     meijer_g40_04_detail, meijer_g40_04_moment)


def test_log_gamma_matches_scipy_on_real_axis():
    z = np.linspace(0.5, 20.5, 41)
    np.testing.assert_allclose(np.real(log_gamma_complex(z)), np.real(loggamma(z)), rtol=1e-12, atol=1e-13)


def test_log_gamma_complex_arguments():
    z = np.array([0.3 + 2.0j, 2.5 - 7.0j, 11.0 + 40.0j])
    np.testing.assert_allclose(np.exp(log_gamma_complex(z)), gamma(z), rtol=1e-11)


def test_log_gamma_reflection():
    assert np.exp(log_gamma_complex(-2.5)) == pytest.approx(gamma(-2.5), rel=1e-12)


@pytest.mark.parametrize("z", [0.0, -1.0, -3.0])
def test_log_gamma_poles(z):
    with pytest.raises(GammaPoleError):
        log_gamma_complex(z)


def test_kummer_trivial_and_polynomial_cases():
    assert kummer_1f1(0.0, 2.5, -4.0) == 1.0
    assert kummer_1f1(-1.0, 2.5, -4.0) == pytest.approx(2.6, rel=1e-14)
    assert kummer_1f1(-2.0, 1.5, -3.0) == pytest.approx(7.4, rel=1e-14)


@pytest.mark.parametrize("a,b,z", [(0.25, 2.5, -4.0), (0.25, 2.5, -0.01), (-0.75, 3.5, 2.0), (1.5, 4.5, 6.0)])
def test_kummer_matches_scipy(a, b, z):
    assert kummer_1f1(a, b, z) == pytest.approx(hyp1f1(a, b, z), rel=1e-11)


@pytest.mark.parametrize("a,b,z", [(0.25, 2.5, -400.0), (0.25, -1.5, -1.0), (0.25, -1.5, -25.0), (0.25, -1.5, -100.0)])
def test_kummer_large_negative_argument(a, b, z):
    expected = float(mpmath.hyp1f1(a, b, z))
    assert kummer_1f1(a, b, z) == pytest.approx(expected, rel=1e-9)


def test_kummer_vectorised():
    z = -np.linspace(0.0, 50.0, 11)
    expected = [float(mpmath.hyp1f1(0.25, 2.5, zi)) for zi in z]
    np.testing.assert_allclose(kummer_1f1(0.25, 2.5, z), expected, rtol=1e-10)


def test_kummer_rejects_nonpositive_integer_b():
    with pytest.raises(InvalidParameterError):
        kummer_1f1(0.5, -2.0, -1.0)


def test_kummer_derivative():
    for z in (-0.5, -9.0, 3.0):
        expected = float(mpmath.diff(lambda s: mpmath.hyp1f1(0.25, 2.5, s), z))
        assert kummer_1f1_deriv(0.25, 2.5, z) == pytest.approx(expected, rel=1e-9)


def test_kummer_ratio_is_quotient():
    z = np.array([-0.3, -4.0, -30.0])
    quotient = kummer_1f1(1.25, 3.5, z) / kummer_1f1(0.25, 2.5, z)
    np.testing.assert_allclose(kummer_1f1_ratio(0.25, 2.5, z), quotient, rtol=1e-10)


def test_laguerre_against_scipy():
    y = np.linspace(0.0, 30.0, 61)
    for nu in (0.5, 1.5, 2.5):
        for n in range(11):
            expected = eval_genlaguerre(n, nu, y)
            np.testing.assert_allclose(laguerre(n, nu, y), expected, rtol=1e-10,
                                       atol=1e-10 * np.max(np.abs(expected)))


def test_laguerre_at_origin_is_binomial():
    assert laguerre(3, 0.5, 0.0) == pytest.approx(2.1875, rel=1e-14)


def test_laguerre_negative_degree():
    with pytest.raises(ValueError):
        laguerre(-1, 0.5, 1.0)


def test_hyper_0f3_values():
    assert hyper_0f3(1.5, 2.5, 3.5, 0.0) == 1.0
    for z in (10.0, -10.0, 250.0):
        expected = float(mpmath.hyper([], [2.5, 2.5, 3.5], z))
        assert hyper_0f3(2.5, 2.5, 3.5, z) == pytest.approx(expected, rel=1e-13)


def test_hyper_0f3_partial_sums_converge_to_total():
    sums = hyper_0f3_partial_sums(2.5, 2.5, 3.5, 4.0, 60)
    assert sums[0] == 1.0
    assert np.all(np.diff(sums) >= 0)
    assert sums[-1] == pytest.approx(hyper_0f3(2.5, 2.5, 3.5, 4.0), rel=1e-15)


@pytest.mark.parametrize("z", [0.05, 1.0, 10.0, 200.0])
def test_meijer_against_mpmath(z):
    b = [0.0, 0.3, 0.55, 0.8]
    expected = float(mpmath.meijerg([[], []], [b, []], z))
    assert meijer_g40_04(b, z) == pytest.approx(expected, rel=1e-8)


def test_meijer_detail_reports_contour():
    result = meijer_g40_04_detail([0.0, 1.5, 1.5, 2.5], 0.5)
    assert result.abscissa >= 0.25
    assert result.imag_residual <= 1e-10 * abs(result.value)
    assert result.n_nodes > 1


def test_meijer_moment_identity():
    b = [0.0, 0.3, 0.55, 0.8]
    expected = math.prod(math.gamma(bj + 3) for bj in b)
    assert meijer_g40_04_moment(b, 2) == pytest.approx(expected, rel=1e-12)


def test_meijer_fixed_contour_left_of_poles():
    with pytest.raises(ContourPlacementError):
        meijer_g40_04([0.0, 1.5, 1.5, 2.5], 1.0, Accuracy(contour_abscissa=-0.5))


def test_meijer_rejects_nonpositive_argument():
    with pytest.raises(ValueError):
        meijer_g40_04([0.0, 1.5, 1.5, 2.5], 0.0)


def test_accuracy_validation():
    with pytest.raises(ValueError):
        Accuracy(rel_tol=0.0)
    with pytest.raises(ValueError):
        Accuracy(max_terms=0)


def test_terminating_kummer_far_out_is_quiet(caplog):
    z = -np.linspace(0.0, 400.0, 9)
    with caplog.at_level(logging.WARNING, logger="specfun"):
        values = kummer_1f1(-1.0, 2.5, z)
    np.testing.assert_allclose(values, 1.0 - z / 2.5, rtol=1e-14)
    assert "accuracy loss" not in caplog.text

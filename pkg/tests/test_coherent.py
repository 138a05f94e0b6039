import numpy as np
import pytest

import coherent
from coherent import TruncationError, coherent_coeffs
from fock import OpKind, build_fock_op
from specfun import hyper_0f3, hyper_0f3_partial_sums

RADII = [0.1, 1.0, 5.0, 20.0, 3.0 + 4.0j]


def test_vacuum_state(broken):
    state = coherent_coeffs(broken, 0.0)
    assert state.N == 2
    np.testing.assert_array_equal(state.coeffs, [1.0, 0.0])
    assert state.c0 == 1.0


def test_unbroken_vacuum_sits_on_first_excited_level(unbroken):
    state = coherent_coeffs(unbroken, 0.0)
    assert state.offset == 1
    np.testing.assert_array_equal(state.coeffs, [0.0, 1.0, 0.0])


@pytest.mark.parametrize("mu", RADII)
def test_normalisation(broken, mu):
    assert coherent_coeffs(broken, mu).norm_squared() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("mu", RADII)
def test_unbroken_normalisation(unbroken, mu):
    state = coherent_coeffs(unbroken, mu)
    assert state.coeffs[0] == 0.0
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_cumulative_weights_are_0f3_partial_sums(broken):
    state = coherent_coeffs(broken, 3.0)
    weights = np.cumsum(np.abs(state.coeffs) ** 2)
    partial = state.c0 ** 2 * hyper_0f3_partial_sums(2.5, 2.5, 3.5, 9.0 / 16.0, state.N)
    np.testing.assert_allclose(weights, partial, rtol=1e-12)


def test_normalisation_constant(broken):
    assert coherent_coeffs(broken, 1.0).c0 == pytest.approx(hyper_0f3(2.5, 2.5, 3.5, 1.0 / 16.0) ** -0.5,
                                                            rel=1e-14)


@pytest.mark.parametrize("params_name", ["broken", "unbroken"])
@pytest.mark.parametrize("mu", RADII)
def test_eigenvalue_equation(request, params_name, mu):
    params = request.getfixturevalue(params_name)
    state = coherent_coeffs(params, mu)
    assert coherent.eigenvalue_residual(state) < 1e-10


@pytest.mark.parametrize("mu", RADII)
def test_minimum_uncertainty(broken, mu):
    lhs, rhs = coherent.uncertainty_product(coherent_coeffs(broken, mu))
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_vacuum_uncertainty_values(broken):
    state = coherent_coeffs(broken, 0.0)
    var1, var2 = coherent.quadrature_variances(state)
    assert var1 == pytest.approx(87.5) and var2 == pytest.approx(87.5)
    lhs, rhs = coherent.uncertainty_product(state)
    assert lhs == pytest.approx(7656.25, rel=1e-12)
    assert rhs == pytest.approx(7656.25, rel=1e-12)
    assert coherent.phi_expectation(broken, 0.0) == pytest.approx(350.0, rel=1e-14)


def test_perturbed_state_breaks_equality(broken):
    perturbed = coherent.perturbed_state(coherent_coeffs(broken, 0.0), 0.5)
    assert perturbed.N == 4
    assert not perturbed.exact_eigenstate
    lhs, rhs = coherent.uncertainty_product(perturbed)
    assert lhs - rhs == pytest.approx(1234.8, rel=1e-9)


def test_overlap_closed_form(broken):
    for mu_a, mu_b in ((1.0, 2.0), (0.5, -1.5), (4.0, 4.0)):
        a, b = coherent_coeffs(broken, mu_a), coherent_coeffs(broken, mu_b)
        assert coherent.overlap(a, b).real == pytest.approx(coherent.overlap_closed_form(a, b), rel=1e-12)
    same = coherent_coeffs(broken, 2.0)
    assert coherent.overlap(same, same) == pytest.approx(1.0, abs=1e-12)


def test_overlap_closed_form_needs_real_product(broken):
    with pytest.raises(ValueError):
        coherent.overlap_closed_form(coherent_coeffs(broken, 1.0), coherent_coeffs(broken, 1.0j))


def test_overlap_across_models(broken, unbroken):
    with pytest.raises(ValueError):
        coherent.overlap(coherent_coeffs(broken, 1.0), coherent_coeffs(unbroken, 1.0))


def test_truncation_cap(broken):
    with pytest.raises(TruncationError):
        coherent_coeffs(broken, 20.0, n_cap=3)


@pytest.mark.parametrize("params_name", ["broken", "unbroken"])
def test_repeated_raising_reaches_ladder_states(request, params_name):
    params = request.getfixturevalue(params_name)
    assert coherent.raise_power_check(params, 5) < 1e-12


def test_commutator_expectations_vanish(broken):
    state = coherent_coeffs(broken, 2.0 + 1.0j)
    for value in coherent.commutator_expectations(state).values():
        assert abs(value) < 1e-9


def test_expectation_dimension_check(broken):
    state = coherent_coeffs(broken, 1.0)
    with pytest.raises(ValueError):
        coherent.expectation(state, build_fock_op(broken, OpKind.H, state.N + 1))


def test_scan_minimum_at_origin(broken):
    scan = coherent.min_uncertainty_scan(broken, 5.0, steps=11)
    assert scan.mu0 == 0.0
    assert not scan.interior
    assert scan.f_min == pytest.approx(350.0, rel=1e-12)
    assert [s.trend for s in scan.segments] == ["increasing"]
    assert len(scan.samples) == 11


def test_scan_validation(broken):
    with pytest.raises(ValueError):
        coherent.min_uncertainty_scan(broken, 0.0)


@pytest.mark.parametrize("phase", [0.0, 0.7, 2.0])
def test_expectations_follow_eigenvalue(broken, phase):
    mu = 3.0 * np.exp(1j * phase)
    state = coherent_coeffs(broken, mu)
    assert coherent.expectation(state, coherent.op(state, OpKind.D)) == pytest.approx(mu, abs=1e-10)
    assert coherent.expectation(state, coherent.op(state, OpKind.X1)).real == pytest.approx(mu.real, abs=1e-10)
    assert coherent.expectation(state, coherent.op(state, OpKind.X2)).real == pytest.approx(mu.imag, abs=1e-10)


def test_vacuum_energy(broken):
    state = coherent_coeffs(broken, 0.0)
    assert coherent.expectation(state, coherent.op(state, OpKind.H)).real == pytest.approx(5.0)


def test_large_eigenvalue_residual(broken):
    assert coherent.eigenvalue_residual(coherent_coeffs(broken, 10.0, rel_tail=1e-14)) < 1e-10


def test_overlap_hermitian_and_not_orthogonal(broken):
    a, b = coherent_coeffs(broken, 2.0), coherent_coeffs(broken, 6.0 + 1.0j)
    assert coherent.overlap(a, b) == pytest.approx(np.conj(coherent.overlap(b, a)), abs=1e-14)
    real_pair = coherent.overlap(a, coherent_coeffs(broken, 6.0)).real
    assert 0.0 < real_pair < 1.0


def test_unbroken_first_level_uncertainty(unbroken):
    lhs, rhs = coherent.uncertainty_product(coherent_coeffs(unbroken, 0.0))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_normalisation_overflow_reports_radius_limit(broken):
    with pytest.raises(TruncationError, match="must stay below"):
        coherent_coeffs(broken, 1e7)
    assert 1e5 < coherent.MU_OVERFLOW < 2e5

import math

import numpy as np
import pytest

import fock
from fock import NegativeRadicandError, OpKind, build_fock_op
from model import ModelParams, Phase, energy

PARAM_SETS = [
    ModelParams(0.0, 1.0),
    ModelParams(1.0, 1.0),
    ModelParams(1.0, 3.0),
    ModelParams(2.5, -3.5),
    ModelParams(1.0, 0.5, "unbroken"),
    ModelParams(1.0, 1.0, "unbroken"),
]


def unchecked_params(gamma: float, epsilon: float) -> ModelParams:
    """ModelParams outside the admissible region, bypassing validation."""
    p = object.__new__(ModelParams)
    object.__setattr__(p, "gamma", gamma)
    object.__setattr__(p, "epsilon", epsilon)
    object.__setattr__(p, "phase", Phase.BROKEN)
    return p


def test_broken_structure_functions(broken):
    assert fock.f_n(broken, 0) == 0.0
    assert fock.f_n(broken, 1) ** 2 == pytest.approx(350.0, rel=1e-14)
    assert fock.f_n(broken, 2) == pytest.approx(-42.0, rel=1e-14)


def test_unbroken_structure_functions():
    p = ModelParams(1.0, 1.0, "unbroken")
    assert fock.g_n(p, 1) ** 2 == pytest.approx(112.0, rel=1e-14)
    assert fock.ladder_element(p, 1) == 0.0
    assert fock.ladder_element(p, 2) == fock.g_n(p, 1)


def test_structure_function_phase_guard(broken):
    with pytest.raises(ValueError):
        fock.g_n(broken, 1)


def test_negative_radicand():
    with pytest.raises(NegativeRadicandError):
        fock.f_n(unchecked_params(0.0, -3.0), 1)


@pytest.mark.parametrize("params", PARAM_SETS)
def test_phi_is_difference_of_squared_ladder(params):
    base = 0 if params.phase is Phase.BROKEN else 1
    for n in range(base, base + 10):
        lhs = fock.ladder_element(params, n + 1) ** 2 - fock.ladder_element(params, n) ** 2
        assert fock.phi(params, energy(params, n)) == pytest.approx(lhs, rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("params", PARAM_SETS)
def test_psi_shift_identity(params):
    np.testing.assert_allclose(fock.shifted_difference_coeffs(params),
                               fock.structure_function_coeffs(params), rtol=1e-12, atol=1e-9)


def test_psi_on_ground_state(broken):
    assert fock.psi(broken, 5.0) == pytest.approx(350.0, rel=1e-14)


def test_printed_psi_variant_fails_shift_identity(broken):
    h = np.array([5.0, 7.0, 9.0])
    difference = fock.psi_printed(broken, h) - fock.psi_printed(broken, h - 2.0)
    assert fock.psi_printed(broken, 5.0) == pytest.approx(490.0)
    assert not np.allclose(difference, fock.phi(broken, h))


@pytest.mark.parametrize("params", PARAM_SETS)
def test_algebra_residuals(params):
    residuals = fock.algebra_residuals(params, 12)
    assert set(residuals) == {"[H,D]+2D", "[H,D_dag]-2D_dag", "[D,D_dag]-Phi(H)",
                              "[H,X1]+2iX2", "[H,X2]-2iX1", "[X1,X2]-(i/2)Phi(H)"}
    assert max(residuals.values()) < 1e-9


@pytest.mark.parametrize("params", PARAM_SETS)
def test_casimir_vanishes(params):
    energies = np.array([energy(params, n) for n in range(11)])
    scale = max(float(np.max(np.abs(fock.psi(params, energies)))), 1.0)
    assert fock.casimir_residual(params, 12) / scale < 1e-9


def test_normalized_state_coefficient(broken):
    assert fock.normalized_state_coeff(broken, 2) == pytest.approx(1.0 / (math.sqrt(350.0) * 42.0), rel=1e-12)
    assert fock.normalized_state_coeff(broken, 0) == 1.0


def test_structure_product(broken):
    assert fock.structure_product(broken, 2) == pytest.approx(350.0 * 1764.0, rel=1e-13)


def test_operator_shapes_and_hermiticity(broken):
    x1 = build_fock_op(broken, OpKind.X1, 6).to_dense()
    x2 = build_fock_op(broken, "X2", 6).to_dense()
    np.testing.assert_allclose(x1, x1.conj().T)
    np.testing.assert_allclose(x2, x2.conj().T)
    h = build_fock_op(broken, OpKind.H, 6).to_dense()
    np.testing.assert_allclose(np.diag(h), [5.0, 7.0, 9.0, 11.0, 13.0, 15.0])


def test_lowering_matrix_layout(broken):
    d = build_fock_op(broken, OpKind.D, 3).to_dense()
    assert d[0, 1] == pytest.approx(-math.sqrt(350.0))
    assert d[1, 2] == pytest.approx(-42.0)
    assert np.count_nonzero(d) == 2


def test_operator_validation(broken):
    with pytest.raises(ValueError):
        build_fock_op(broken, OpKind.D, 1)
    with pytest.raises(ValueError):
        build_fock_op(broken, "Q", 4)
    with pytest.raises(ValueError):
        build_fock_op(broken, OpKind.D, 4) @ np.ones(3)
    with pytest.raises(ValueError):
        fock.commutator(build_fock_op(broken, OpKind.D, 4), build_fock_op(broken, OpKind.H, 5))


def test_structure_function_values():
    assert fock.g_n(ModelParams(0.0, 1.0, "unbroken"), 1) == pytest.approx(-math.sqrt(80.0), rel=1e-14)
    assert fock.phi(ModelParams(1.0, 1.0), 7.0) == pytest.approx(1414.0, rel=1e-14)
    assert fock.phi(ModelParams(1.0, 1.0), 0.0) == 0.0


@pytest.mark.parametrize("params", PARAM_SETS)
def test_psi_reproduces_raising_squares(params):
    base = 0 if params.phase is Phase.BROKEN else 1
    for n in range(base, 51):
        expected = fock.ladder_element(params, n + 1) ** 2
        assert fock.psi(params, energy(params, n)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("params", [
    ModelParams(0.0, 0.5), ModelParams(1.0, 1.0), ModelParams(2.5, -1.0), ModelParams(1.0, 4.0),
    ModelParams(0.0, 1.0, "unbroken"), ModelParams(1.0, 1.0, "unbroken"), ModelParams(2.0, 0.5, "unbroken"),
])
def test_algebra_closure_large_truncation(params):
    residuals = fock.algebra_residuals(params, 64)
    for key in ("[H,D]+2D", "[H,D_dag]-2D_dag", "[D,D_dag]-Phi(H)"):
        assert residuals[key] < 1e-12


@pytest.mark.parametrize("params", PARAM_SETS)
def test_casimir_vanishes_at_larger_truncation(params):
    energies = np.array([energy(params, n) for n in range(31)])
    scale = max(float(np.max(np.abs(fock.psi(params, energies)))), 1.0)
    assert fock.casimir_residual(params, 32) / scale < 1e-9

"""Tests for the truncated Fock picture."""

import numpy as np
import pytest
from scipy.linalg import expm

from src.group.heisenberg import GroupPoint
from src.reps.bargmann import (
    FockError,
    FockOp,
    FockVec,
    TruncationLeakageError,
    annihilation,
    beta_action,
    creation,
    dynamical_group,
    euler_operator,
    number_operator,
)


@pytest.fixture
def state(rng):
    """Random normalized vector concentrated on low levels."""
    coeffs = rng.normal(size=32) + 1j * rng.normal(size=32)
    coeffs *= np.exp(-np.arange(32))
    return FockVec(coeffs / np.linalg.norm(coeffs))


def test_euler_operator_default():
    """Test that D = 4, n = 1 gives diag(½, 1, 3/2, 2)."""
    np.testing.assert_array_equal(euler_operator(4).matrix, np.diag([0.5, 1.0, 1.5, 2.0]))


def test_euler_operator_forms():
    """Test both forms of the Euler operator at D = 4."""
    np.testing.assert_array_equal(
        np.diag(euler_operator(4, form="generator").matrix).real, [0.5, 1.5, 2.5, 3.5]
    )
    np.testing.assert_array_equal(
        np.diag(euler_operator(4, form="display").matrix).real, [0.5, 1.0, 1.5, 2.0]
    )


def test_euler_spectrum():
    """Test the spectrum {m + ½} at n = 1, D = 64."""
    spectrum = euler_operator(64, form="generator").spectrum()
    np.testing.assert_allclose(spectrum, np.arange(64) + 0.5, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_constant_eigenvalue(n):
    """Test that constants have eigenvalue n/2."""
    one = FockVec.basis(8, 0)
    image = euler_operator(8, n)(one)
    np.testing.assert_array_equal(image.coeffs, 0.5 * n * one.coeffs)


def test_euler_is_number_plus_constant():
    """Test T = (n/2)I + z∂z = (n/2)I + a⁺a⁻ and its display form ½(I + a⁺a⁻)."""
    D = 16
    ladder = creation(D) @ annihilation(D)
    np.testing.assert_allclose(ladder.matrix, number_operator(D).matrix, atol=1e-12)
    np.testing.assert_allclose(
        euler_operator(D, form="generator").matrix, 0.5 * np.eye(D) + ladder.matrix, atol=1e-12
    )
    np.testing.assert_allclose(
        euler_operator(D).matrix, 0.5 * (np.eye(D) + ladder.matrix), atol=1e-12
    )


def test_canonical_commutation():
    """Test [a⁻, a⁺] = I away from the truncation edge."""
    D = 16
    a_minus, a_plus = annihilation(D), creation(D)
    comm = (a_minus @ a_plus - a_plus @ a_minus).matrix
    np.testing.assert_allclose(comm[:D - 1, :D - 1], np.eye(D - 1), atol=1e-12)


def test_invalid_dimensions():
    """Test the dimension guards."""
    with pytest.raises(FockError):
        euler_operator(1)
    with pytest.raises(FockError):
        euler_operator(4, form="weyl")
    with pytest.raises(FockError):
        FockVec.basis(4, 4)
    with pytest.raises(FockError):
        euler_operator(4)(FockVec.basis(5, 0))
    with pytest.raises(FockError):
        FockOp(np.ones((2, 3)))


def test_dynamical_group_at_zero(state):
    """Test that t = 0 is the identity."""
    assert np.array_equal(dynamical_group(state, 0.0).coeffs, state.coeffs)


def test_no_transitions():
    """Test that basis monomials only pick up phases."""
    D = 16
    for m in range(D):
        evolved = dynamical_group(FockVec.basis(D, m), 1.234)
        np.testing.assert_allclose(np.abs(evolved.coeffs), np.abs(FockVec.basis(D, m).coeffs), atol=1e-15)


def test_dynamical_group_matches_exponential(state):
    """Test e^{itT} against the matrix exponential of the Euler operator."""
    t = 0.7
    U = FockOp(expm(1j * t * euler_operator(state.dim_cut, form="generator").matrix))
    assert dynamical_group(state, t).distance(U(state)) < 1e-12


def test_dynamical_group_is_unitary(state):
    """Test norm preservation."""
    for t in (0.3, 2.0, 17.5):
        assert abs(dynamical_group(state, t).norm() - state.norm()) < 1e-14


@pytest.mark.parametrize("n", [1, 2])
def test_dynamical_group_period(state, n):
    """Test the global phase e^{iπn} at t = 2π and the identity at t = 4π."""
    np.testing.assert_allclose(
        dynamical_group(state, 2 * np.pi, n).coeffs, (-1) ** n * state.coeffs, atol=1e-12
    )
    np.testing.assert_allclose(dynamical_group(state, 4 * np.pi, n).coeffs, state.coeffs, atol=1e-12)


def test_beta_identity(state):
    """Test that the group identity acts trivially."""
    assert beta_action(GroupPoint(0.0), 0.5, state).distance(state) < 1e-14


def test_beta_central_phase(state):
    """Test that (s, 0, 0) acts by e^{-2isħ}."""
    image = beta_action(GroupPoint(0.8), 0.5, state)
    np.testing.assert_allclose(image.coeffs, np.exp(-2j * 0.8 * 0.5) * state.coeffs, atol=1e-14)


def test_beta_homomorphism(state):
    """Test β(g)β(h) = β(gh) for small group elements at D = 32."""
    hbar = 0.5
    g = GroupPoint(0.1, 0.2, -0.1)
    h = GroupPoint(-0.3, 0.15, 0.25)
    lhs = beta_action(g, hbar, beta_action(h, hbar, state))
    rhs = beta_action(g * h, hbar, state)
    assert lhs.distance(rhs) < 1e-6


def test_beta_is_unitary(state):
    """Test norm preservation of the truncated action."""
    image = beta_action(GroupPoint(0.4, -0.3, 0.2), 1.0, state)
    assert image.norm() == pytest.approx(state.norm(), rel=1e-6)


def test_beta_refuses_large_leakage():
    """Test the truncation guard."""
    with pytest.raises(TruncationLeakageError):
        beta_action(GroupPoint(0.0, 3.0, 3.0), 1.0, FockVec.basis(4, 0))


def test_beta_needs_positive_hbar(state):
    """Test the ħ guard."""
    with pytest.raises(FockError):
        beta_action(GroupPoint(0.0), 0.0, state)

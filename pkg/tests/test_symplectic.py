"""
Tests for symplectic linear algebra and the Williamson/Euler decompositions.
"""

import numpy as np
import pytest

from src.errors import DimensionError, DomainError, NotPureStateError
from src.symplectic import (
    SymplecticMatrix, euler_decomposition, is_symplectic, random_symplectic, squeezer_block,
    symplectic_eigenvalues, symplectic_form, williamson_euler,
)


def test_symplectic_form_single_mode():
    """J for one mode is [[0, 1], [-1, 0]]"""
    assert np.array_equal(symplectic_form(1), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_symplectic_form_rejects_zero_modes():
    """Mode count must be positive"""
    with pytest.raises(DimensionError):
        symplectic_form(0)


def test_squeezer_and_rotation_are_symplectic():
    """Single-mode squeezer and rotation satisfy S J S^T = J"""
    theta = 0.3
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    assert is_symplectic(squeezer_block([0.7]))
    assert is_symplectic(R)


def test_non_symplectic_matrix_rejected():
    """diag(2, 2) is not symplectic"""
    assert not is_symplectic(np.diag([2.0, 2.0]))
    with pytest.raises(DomainError):
        SymplecticMatrix(np.diag([2.0, 2.0]))


def test_odd_dimension_rejected():
    """Matrices must be 2m x 2m"""
    with pytest.raises(DimensionError):
        is_symplectic(np.eye(3))


def test_vacuum_decomposition():
    """Vacuum covariance has no squeezing"""
    dec = williamson_euler(0.25 * np.eye(2))
    assert np.allclose(dec.xi, [0.0])
    assert dec.s == pytest.approx(1.0)
    assert np.allclose(dec.covariance(), 0.25 * np.eye(2))


def test_squeezed_decomposition():
    """diag(e^-1, e^1)/4 has xi = 1/2"""
    V = 0.25 * np.diag([np.exp(-1.0), np.exp(1.0)])
    dec = williamson_euler(V)
    assert dec.xi == pytest.approx([0.5])
    assert np.allclose(dec.covariance(), V, atol=1e-12)
    assert is_symplectic(dec.O)


def test_random_pure_state_round_trip():
    """O D^2 O^T / 4 reproduces random pure covariances"""
    for seed in range(5):
        S = random_symplectic(3, 0.8, seed).entries
        V = 0.25 * S @ S.T
        dec = williamson_euler(V)
        assert np.max(np.abs(dec.covariance() - V)) < 1e-9
        assert is_symplectic(dec.O, 1e-9)
        assert np.all(np.diff(dec.xi) <= 1e-12)


def test_prescribed_squeezing_recovered():
    """Squeezing parameters of O D O' come back sorted"""
    S = random_symplectic(2, 1.0, seed=3, xi=[0.2, 0.9])
    dec = williamson_euler(0.25 * S.entries @ S.entries.T)
    assert dec.xi == pytest.approx([0.9, 0.2], abs=1e-8)


def test_prescribed_squeezing_length_checked():
    """One squeezing parameter per mode"""
    with pytest.raises(DimensionError):
        random_symplectic(2, 1.0, seed=3, xi=[0.2])


def test_partially_squeezed_two_mode_state():
    """One squeezed mode and one vacuum mode decompose cleanly"""
    V = 0.25 * np.diag([np.exp(-0.8), np.exp(0.8), 1.0, 1.0])
    dec = williamson_euler(V)
    assert dec.xi == pytest.approx([0.4, 0.0], abs=1e-10)
    assert np.allclose(dec.covariance(), V, atol=1e-12)


def test_thermal_state_not_pure():
    """Thermal covariance fails the purity check"""
    with pytest.raises(NotPureStateError):
        williamson_euler(0.25 * 1.6 * np.eye(2))


def test_nonsymmetric_covariance_rejected():
    """Asymmetric input raises a domain error"""
    with pytest.raises(DomainError):
        williamson_euler(np.array([[0.25, 0.1], [0.0, 0.25]]))


def test_non_positive_covariance_rejected():
    """Indefinite input raises a domain error"""
    with pytest.raises(DomainError):
        williamson_euler(np.diag([0.25, -0.25]))


def test_symplectic_eigenvalues_of_thermal_state():
    """Thermal n=0.3 has symplectic eigenvalue (2n+1)/4"""
    nu = symplectic_eigenvalues(0.25 * 1.6 * np.eye(4))
    assert nu == pytest.approx([0.4, 0.4])


def test_euler_decomposition_reproduces_input():
    """O D O' equals S for random symplectic matrices"""
    for seed in range(5):
        S = random_symplectic(2, 1.0, seed).entries
        dec = euler_decomposition(S)
        assert np.max(np.abs(dec.symplectic() - S)) < 1e-9
        assert is_symplectic(dec.Oprime, 1e-9)
        assert np.allclose(dec.Oprime @ dec.Oprime.T, np.eye(4), atol=1e-9)


def test_passive_matrix_has_unit_scale():
    """Orthogonal symplectic matrices have s = 1"""
    S = random_symplectic(2, 0.0, seed=1).entries
    assert euler_decomposition(S).s == pytest.approx(1.0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import alpha_lists, disk_points
from opuc.numerics import CircleGrid, RangeError
from opuc.szego import (InvalidCoefficientError, VerblunskySeq, monic, norms, ortho_values, rotation_density,
                        star, szego_polys, transfer, zeros)


@pytest.mark.parametrize("a", [0.5, 0.3j, -0.2 + 0.7j])
def test_degree_one_zero_is_conjugate(a):
    assert zeros([a], 1) == pytest.approx([np.conj(a)])


def test_degree_two_coefficients():
    a0, a1 = 0.4 - 0.1j, 0.2 + 0.5j
    c = monic([a0, a1], 2).coeffs
    expected = [-np.conj(a1), -np.conj(a0) + a0 * np.conj(a1), 1]
    assert np.allclose(c, expected, atol=1e-15)


def test_free_case_is_monomial():
    P = szego_polys([], 5)
    assert np.allclose(P.Phi[5].coeffs, [0, 0, 0, 0, 0, 1])
    assert np.allclose(P.psi[5].coeffs, P.phi[5].coeffs)


@settings(max_examples=60, deadline=None)
@given(alpha_lists(max_size=10))
def test_structural_identities(a):
    n = len(a)
    P = monic(a, n)
    assert abs(P.coeffs[0] + np.conj(a[-1])) < 1e-12          # Φ_n(0) = -conj α_{n-1}
    assert abs(star(P).coeffs[0] - 1) < 1e-12                 # Φ_n^*(0) = 1
    assert np.abs(zeros(a, n)).max() < 1
    assert norms(a, n)[-1] == pytest.approx(np.prod(1 - np.abs(a) ** 2), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(alpha_lists(max_size=8), disk_points(1.5))
def test_transfer_determinant_is_power_of_z(a, z):
    n = len(a)
    assert abs(transfer(a, n, z).det - z ** n) < 1e-9 * max(1, abs(z) ** n)


@settings(max_examples=40, deadline=None)
@given(alpha_lists(max_size=8))
def test_second_kind_polys_flip_the_sign(a):
    z = np.exp(0.7j)
    phi, _ = ortho_values(a, len(a), z)
    psi, _ = ortho_values(-a, len(a), z)
    two, _ = ortho_values(a, len(a), z, second_kind=True)
    assert np.allclose(psi, two)
    assert np.allclose(np.abs(phi[0]), 1)


def test_orthonormality_against_bernstein_szego():
    a = np.array([0.3, -0.2j, 0.5 + 0.1j, 0.1])
    g = CircleGrid(4096)
    phi, _ = ortho_values(a, 4, g.points)
    w = 1 / np.abs(phi[4]) ** 2
    gram = (phi * w) @ phi.conj().T / g.n_points
    assert np.allclose(gram, np.eye(5), atol=1e-12)


def test_sequence_validation_and_tails():
    with pytest.raises(InvalidCoefficientError):
        VerblunskySeq((0.5, 1.0))
    s = VerblunskySeq((0.1, 0.2), "periodic")
    assert s.period == 2
    assert np.allclose(s.take(5), [0.1, 0.2, 0.1, 0.2, 0.1])
    assert np.allclose(s.shifted(1).take(3), [0.2, 0.1, 0.2])
    f = VerblunskySeq((0.1, 0.0, 0.3, 0.0))
    assert f.support_length() == 3
    assert np.allclose(f.take(6), [0.1, 0, 0.3, 0, 0, 0])


def test_rotation_density_refuses_a_coarse_grid():
    with pytest.raises(RangeError):
        rotation_density([0.1] * 8, 8, CircleGrid(256))


@settings(max_examples=15, deadline=None)
@given(alpha_lists(max_size=6, max_modulus=0.7))
def test_rotation_density_integrates_to_one(a):
    rep = rotation_density(a, len(a), CircleGrid(4096))
    assert rep.integral == pytest.approx(1, abs=1e-8)
    assert rep.identity_gap < 1e-6

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opuc.numerics import (CircleGrid, ValidationError, det_lu, eig_dense, fourier_coeffs, match_multisets,
                           schatten_norm, series_div, series_exp, series_mul, synthesize)


def random_matrix(seed, n):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 24))
def test_eigenvalues_agree_with_lapack(seed, n):
    M = random_matrix(seed, n)
    assert match_multisets(eig_dense(M), np.linalg.eigvals(M)) < 1e-8 * max(1, np.abs(M).max() * n)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 16))
def test_lu_determinant(seed, n):
    M = random_matrix(seed, n)
    ref = np.linalg.det(M)
    assert abs(det_lu(M) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_eigenvalues_of_permutation():
    P = np.roll(np.eye(5), 1, axis=0)
    ev = eig_dense(P)
    assert match_multisets(ev, np.exp(2j * np.pi * np.arange(5) / 5)) < 1e-12


def test_singular_determinant_is_zero():
    assert det_lu(np.ones((3, 3))) == 0


@pytest.mark.parametrize("n", [8, 100, 4095, 0])
def test_grid_must_be_power_of_two(n):
    with pytest.raises(ValidationError):
        CircleGrid(n)


def test_fourier_of_cosine():
    g = CircleGrid(64)
    c = fourier_coeffs(3 * np.cos(2 * g.theta) + 1, -3, 3)
    assert c[0] == pytest.approx(1)
    assert c[2] == pytest.approx(1.5) and c[-2] == pytest.approx(1.5)
    assert abs(c[1]) < 1e-14


def test_synthesize_inverts_fourier():
    rng = np.random.default_rng(3)
    coeffs = {k: complex(*rng.normal(size=2)) for k in range(-5, 6)}
    vals = synthesize(coeffs, 64)
    back = fourier_coeffs(vals, -5, 5)
    assert max(abs(back[k] - coeffs[k]) for k in coeffs) < 1e-13


def test_series_exp_is_exponential():
    assert np.allclose(series_exp(np.array([0, 1.0]), 6), [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120])


def test_series_division_undoes_multiplication():
    a = np.array([1, 2, -1, 0.5], dtype=complex)
    b = np.array([2, 0.3, 1], dtype=complex)
    assert np.allclose(series_div(series_mul(a, b, 6), b, 6)[:4], a)


def test_schatten_two_is_frobenius():
    M = random_matrix(1, 6)
    assert schatten_norm(M, 2) == pytest.approx(np.linalg.norm(M, "fro"))
    assert schatten_norm(M, 1) == pytest.approx(np.linalg.svd(M, compute_uv=False).sum())


def test_multiset_matching_ignores_order():
    a = np.array([1, 2j, -3, 0.5])
    assert match_multisets(a, a[::-1]) == 0

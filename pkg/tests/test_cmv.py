import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import alpha_lists, disk_points
from opuc.cmv import (build_cmv, char_poly_check, gap_certificate, periodized_cmv, resolvent_entry,
                      resolvent_matrix, schatten_distance, theta_block, truncated_cmv, unitary_cmv,
                      wave_operator_diag, wave_packet, zeros_vs_cesaro)
from opuc.numerics import ValidationError
from opuc.szego import VerblunskySeq, monic


def test_free_cmv_pattern():
    C = truncated_cmv([], 4)
    expected = np.array([[0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0]])
    assert np.array_equal(C, expected)


def test_theta_block_is_unitary():
    T = theta_block(0.3 + 0.4j)
    assert np.allclose(T @ T.conj().T, np.eye(2))
    assert T[0, 0] == pytest.approx(0.3 - 0.4j) and T[1, 1] == pytest.approx(-0.3 - 0.4j)


def test_leading_entries():
    a = np.array([0.3, 0.2j, -0.1])
    C = truncated_cmv(a, 3)
    rho0 = np.sqrt(1 - 0.09)
    assert C[0, 0] == pytest.approx(np.conj(a[0]))
    assert C[0, 1] == pytest.approx(rho0 * np.conj(a[1]))
    assert C[1, 0] == pytest.approx(rho0)


@settings(max_examples=40, deadline=None)
@given(alpha_lists(max_size=10))
def test_unitary_completion(a):
    n = len(a) + 1
    U = unitary_cmv(a, n)
    assert np.allclose(U @ U.conj().T, np.eye(n), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(alpha_lists(max_size=10), disk_points(2.0))
def test_characteristic_polynomial(a, z):
    n = len(a)
    assert char_poly_check(a, n, [z]) < 1e-10


@settings(max_examples=30, deadline=None)
@given(alpha_lists(min_size=1, max_size=3).map(lambda x: np.concatenate([x, x[::-1]])), disk_points(1.0))
def test_periodized_fiber_is_unitary(a, b):
    beta = np.exp(1j * np.angle(b)) if b else 1.0
    E = periodized_cmv(a, beta)[0]
    assert np.allclose(E @ E.conj().T, np.eye(len(a)), atol=1e-12)


def test_periodized_needs_even_period():
    with pytest.raises(ValidationError):
        periodized_cmv([0.1, 0.2, 0.3], 1.0)


def test_free_resolvent():
    z = 0.3 + 0.2j
    assert resolvent_entry([], z, 0, 0) == 0
    assert resolvent_entry([], z, 0, 1) == pytest.approx(1)


def test_resolvent_matches_dense_inverse():
    a = [0.5, -0.3j, 0.2]
    z = -0.4 + 0.1j
    G = resolvent_matrix(a, z, 6)
    H = np.linalg.inv(unitary_cmv(a, 300) - z * np.eye(300))[:6, :6]
    assert np.abs(G - H).max() < 1e-10


def test_resolvent_domain():
    with pytest.raises(ValidationError):
        resolvent_matrix([0.5], 1.5, 4)
    with pytest.raises(ValidationError):
        resolvent_matrix(VerblunskySeq((0.5,), "periodic"), 0.3, 4)


def test_variants_agree_where_they_should():
    a = VerblunskySeq((0.3, -0.2j), "periodic")
    half = build_cmv(a, 6).matrix
    ext = build_cmv(a, 6, "extended", offset=4).matrix
    assert np.allclose(half[:4, :4], truncated_cmv(a.take(8), 4))
    assert np.allclose(ext @ np.zeros(6), 0)
    uni = build_cmv([0.3, 0.1], 5, "unitary").matrix
    assert np.allclose(uni @ uni.conj().T, np.eye(5))
    op = build_cmv([0.3, 0.1], 5)
    v = np.arange(5, dtype=complex)
    assert np.allclose(op.apply(v)[:3], (op.matrix @ v)[:3])
    dumped = json.loads(json.dumps(op.dump()))
    assert dumped["variant"] == "half" and len(dumped["matrix_re"]) == 5
    with pytest.raises(ValidationError):
        build_cmv([0.3], 4, "sideways")


def test_schatten_bound():
    rng = np.random.default_rng(4)
    a = 0.6 * rng.random(6) * np.exp(2j * np.pi * rng.random(6))
    b = a + 0.05 * (rng.random(6) - 0.5)
    for p in (1, 2, np.inf):
        lhs, rhs = schatten_distance(a, b, p)
        assert lhs <= rhs


def test_zero_moments_equal_trace_moments():
    t = zeros_vs_cesaro([0.3, 0.2j, -0.4, 0.1], 4)
    assert t.trace_vs_zeros < 1e-12
    big = zeros_vs_cesaro(0.5 ** np.arange(1, 81), 80)
    assert big.zeros_vs_cesaro.max() < 0.05


def test_char_poly_check_uses_monic_polynomial():
    a = [0.2, 0.4j]
    z = 1.7
    assert abs(np.linalg.det(z * np.eye(2) - truncated_cmv(a, 2)) - monic(a, 2)(z)) < 1e-13


def test_wave_packet_certifies_band_spectrum():
    a = VerblunskySeq((0.5,), "periodic")
    psi = wave_packet(a, np.pi, 200)
    cert = gap_certificate(a, np.pi, 0.2, [psi])
    assert cert.violated and cert.witness == 0


def test_wave_operator_limit_is_attained_for_finite_support():
    # the free evolution carries the vector past the perturbation, so
    # C^n C_0^{-n} v stops changing once n exceeds the support
    assert wave_operator_diag([0.5, 0.3j], 30).max() < 1e-13
    d = wave_operator_diag([0.5, 0.3j, 0.2, -0.1, 0.4], 30, vector=[1, 2j, 3])
    assert d[10:].max() < 1e-13

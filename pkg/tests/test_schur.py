import numpy as np
import pytest
from hypothesis import given, settings

from conftest import alpha_lists
from opuc.measures import CircleMeasure, measure_from_alphas, resolving_grid
from opuc.numerics import CircleGrid, ValidationError
from opuc.schur import (CaratheodoryFunction, RationalSchur, TrivialMeasureError, alphas_from_measure,
                        alphas_from_moments, caratheodory_from_schur, geronimus_report, khrushchev_check, moments,
                        schur_from_gammas, schur_params)


def test_single_coefficient_moments_are_geometric():
    c = moments(measure_from_alphas([0.5], 1), 5)
    assert np.allclose(c, 0.5 ** np.arange(6), atol=1e-14)


def test_single_coefficient_caratheodory():
    z = np.array([0.3, -0.2 + 0.4j])
    F = caratheodory_from_schur(RationalSchur(np.array([0.5])), z)
    assert np.allclose(F, (1 + 0.5 * z) / (1 - 0.5 * z))


def test_schur_parameters_of_a_constant():
    g = schur_params(RationalSchur(np.array([0.4j])), 3)
    assert np.allclose(g, [0.4j, 0, 0])


def test_lebesgue_measure_has_vanishing_parameters():
    c = moments(CircleMeasure(np.ones(64)), 6)
    assert np.allclose(alphas_from_moments(c), 0)


@settings(max_examples=30, deadline=None)
@given(alpha_lists(max_size=8, max_modulus=0.8))
def test_moment_round_trip(a):
    n = len(a)
    c = moments(measure_from_alphas(a, n), n)
    assert np.abs(alphas_from_moments(c, n) - a).max() < 1e-8


@settings(max_examples=20, deadline=None)
@given(alpha_lists(max_size=6, max_modulus=0.8))
def test_geronimus_on_a_resolving_grid(a):
    n = len(a)
    assert geronimus_report(a, n, resolving_grid(a, n + 2)).max_error < 1e-8


@settings(max_examples=20, deadline=None)
@given(alpha_lists(max_size=6, max_modulus=0.8))
def test_arnoldi_matches_levinson(a):
    n = len(a)
    mu = measure_from_alphas(a, n)
    assert np.abs(alphas_from_measure(mu, n) - a).max() < 1e-9


def test_schur_function_series_and_pointwise_agree():
    g = np.array([0.3, -0.2j, 0.5])
    f = RationalSchur(g)
    z = 0.1 + 0.2j
    assert abs(np.polyval(f.taylor(40)[::-1], z) - schur_from_gammas(g, z)) < 1e-12


def test_khrushchev_formula():
    a = np.array([0.3, 0.2j, -0.4, 0.1 + 0.1j])
    rep = khrushchev_check(a, 2, [0.3, 0.2j, -0.5 + 0.1j])
    assert rep.max_error < 1e-8


def test_finitely_supported_measure_is_reported():
    th = 2 * np.pi * np.arange(3) / 3
    c = np.array([np.mean(np.exp(-1j * k * th)) for k in range(6)])
    with pytest.raises(TrivialMeasureError) as err:
        alphas_from_moments(c, 5)
    assert len(err.value.partial) <= 3


def test_unnormalized_moments_rejected():
    with pytest.raises(ValidationError):
        alphas_from_moments([2.0, 0.1], 1)


def test_caratheodory_schur_round_trip():
    c = moments(measure_from_alphas([0.3, -0.5j], 2), 30)
    g = schur_params(CaratheodoryFunction(c).schur(), 4)
    assert np.allclose(g, [0.3, -0.5j, 0, 0], atol=1e-10)

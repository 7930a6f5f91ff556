import numpy as np
import pytest
from hypothesis import given, settings

from conftest import alpha_lists
from opuc.measures import (CircleMeasure, entropy, gibbs_functional, higher_sum_rule_report, measure_from_alphas,
                           relative_szego, resolving_grid, shifted_norm_ratio, sum_rule_report)
from opuc.numerics import CircleGrid, ValidationError


def test_single_coefficient_entropy():
    assert entropy(measure_from_alphas([0.5], 1)) == pytest.approx(np.log(0.75), abs=1e-13)


def test_single_coefficient_weight_closed_form():
    g = CircleGrid(256)
    w = measure_from_alphas([0.5], 1, g).weight
    assert np.allclose(w, 0.75 / np.abs(1 - 0.5 * g.points) ** 2)


def test_higher_sum_rule_discrepancy_for_single_coefficient():
    rep = higher_sum_rule_report([0.5], 1)
    assert rep.validated_ratio == pytest.approx(1, abs=1e-12)
    # forms differ by exp(Σ|α_{j+1}-α_j|²) = exp(0.25)
    assert rep.printed_ratio == pytest.approx(np.exp(0.25), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(alpha_lists(max_size=10, max_modulus=0.8))
def test_szego_sum_rule(a):
    assert sum_rule_report(a, len(a)).ratio == pytest.approx(1, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(alpha_lists(max_size=6, max_modulus=0.7))
def test_higher_sum_rule_validated_form(a):
    rep = higher_sum_rule_report(a, len(a))
    assert rep.validated_ratio == pytest.approx(1, abs=1e-6)
    assert rep.printed_left / rep.validated_left == pytest.approx(rep.predicted_discrepancy, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(alpha_lists(max_size=8, max_modulus=0.9))
def test_bernstein_szego_measure_is_normalized(a):
    mu = measure_from_alphas(a, len(a))
    assert mu.total_mass == pytest.approx(1, abs=1e-10)


def test_resolving_grid_refines_near_the_circle():
    assert resolving_grid([0.5], 1).n_points == 4096
    assert resolving_grid([0.999], 1).n_points >= 32768


def test_measure_validation():
    with pytest.raises(ValidationError):
        CircleMeasure(-np.ones(16))
    with pytest.raises(ValidationError):
        CircleMeasure(np.ones(16), [(0.1, 0.2), (0.1, 0.3)])
    with pytest.raises(ValidationError):
        CircleMeasure(np.ones(16), [(0.1, -0.2)])
    with pytest.raises(ValidationError):
        CircleMeasure(np.full(16, 2.0)).check_normalized()


def test_json_round_trip():
    mu = CircleMeasure(np.linspace(0, 2, 32), [(1.0, 0.25)])
    back = CircleMeasure.from_json(mu.to_json())
    assert np.array_equal(back.weight, mu.weight) and back.atoms == mu.atoms


def test_integrate_includes_atoms():
    mu = CircleMeasure(np.full(64, 0.5), [(np.pi, 0.5)])
    assert mu.integrate(lambda t: np.cos(t)) == pytest.approx(-0.5)


def test_gibbs_functional_is_minimized_by_the_inverse_weight():
    mu = measure_from_alphas([0.3, 0.2j], 2)
    best = gibbs_functional(mu, 1 / mu.weight)
    assert best == pytest.approx(entropy(mu), abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = np.exp(rng.normal(scale=0.3, size=mu.grid.n_points)) / mu.weight
        assert gibbs_functional(mu, f) > best


def test_relative_szego_boundary_identity():
    rep = relative_szego([0.5, 0.3j, -0.2], [0.0, 0.5, 0.3j])
    assert rep.boundary_error < 1e-10
    assert rep.tail_errors[-1] < 1e-12


def test_relative_szego_rejects_outside_points():
    with pytest.raises(ValidationError):
        relative_szego([0.5], [1.2])


def test_shifted_norm_ratio_limit():
    lhs, rhs = shifted_norm_ratio([0.5, 0.3j, -0.2], 1, 6)[:2]
    assert lhs == pytest.approx(rhs, rel=1e-10)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import alpha_lists
from opuc.analysis import (JL_CONSTANT, arc_atom_measure, arc_rakhmanov_trend, gap_masspoints, isolated_point_zeros,
                           jl_norm, jl_sandwich)
from opuc.models import gen_constant, gen_random_decay
from opuc.numerics import RangeError, ValidationError


def test_jl_norm_at_breakpoints():
    a = np.array([3.0, 4.0, 12.0])
    assert jl_norm(a, 0) == 3
    assert jl_norm(a, 1) == 5
    assert jl_norm(a, 2) == 13
    assert jl_norm(a, 1.5) == pytest.approx(np.sqrt(25 + 72))
    with pytest.raises(RangeError):
        jl_norm(a, 2.5)
    with pytest.raises(ValidationError):
        jl_norm(a, -1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=12), st.data())
def test_jl_norm_continuous_and_nondecreasing(vals, data):
    a = np.array(vals)
    k = data.draw(st.integers(1, len(a) - 2))
    eps = 1e-9
    # the squared norm is Lipschitz across the integer breakpoint k
    lip = eps * np.max(a ** 2) + 1e-12
    assert abs(jl_norm(a, k - eps) ** 2 - jl_norm(a, k) ** 2) <= lip
    assert abs(jl_norm(a, k + eps) ** 2 - jl_norm(a, k) ** 2) <= lip
    xs = np.linspace(0, len(a) - 1, 50)
    vs = [jl_norm(a, x) for x in xs]
    assert all(u <= v + 1e-12 for u, v in zip(vs, vs[1:]))


@settings(max_examples=15, deadline=None)
@given(alpha_lists(max_size=5, max_modulus=0.8), st.sampled_from([0.5, 0.9, 0.99]), st.floats(0, 2 * np.pi))
def test_sandwich_holds(a, r, t):
    rep = jl_sandwich(a, np.exp(1j * t), r)
    assert rep.A == JL_CONSTANT
    assert rep.lower <= rep.F_abs <= rep.upper
    assert rep.F_quadrature == pytest.approx(rep.F_abs, rel=1e-8)


def test_sandwich_free_case():
    rep = jl_sandwich([0.0], 1.0, 0.9)
    assert rep.F_abs == pytest.approx(1)
    assert rep.ratio == pytest.approx(1)


def test_sandwich_on_infinite_sequence():
    rep = jl_sandwich(gen_random_decay(0.5, 0.7, seed=3), np.exp(0.4j), 0.9)
    assert rep.holds and rep.F_quadrature is None


def test_sandwich_input_checks():
    with pytest.raises(ValidationError):
        jl_sandwich([0.5], 0.5, 0.9)
    with pytest.raises(ValidationError):
        jl_sandwich([0.5], 1.0, 1.0)


def test_isolated_atom_distance():
    mu, h = arc_atom_measure(1.0, 0.6, 0.2)
    assert mu.total_mass == pytest.approx(1)
    rep = isolated_point_zeros(mu, 1.0, range(5, 41))
    # δ is the distance from 1 to the chord through the arc ends, 1 - cos h,
    # enlarged slightly because exp(-1/s) underflows to 0 right at the ends
    assert 1 - np.cos(h) <= rep.delta < 1 - np.cos(h) + 3e-3
    assert (rep.counts[rep.ns >= 20] == 1).all()
    assert rep.in_hull and rep.slope < 0


def test_isolated_atom_must_be_outside_the_hull():
    mu, _ = arc_atom_measure(1.0, 0.6, 0.2)
    with pytest.raises(ValidationError):
        isolated_point_zeros(mu, -1.0, [10])


@pytest.mark.parametrize("a", [0.5, -0.5, -0.3, 0.3j, 0.6 - 0.2j, -0.8])
def test_gap_mass_point_of_constant_sequences(a):
    # α ≡ a carries a point in its gap exactly when |a + 1/2| > 1/2
    rep = gap_masspoints([a, a])
    assert rep.stable
    assert len(rep.points) == (1 if abs(a + 0.5) > 0.5 else 0)
    for z in rep.points:
        assert abs(abs(z) - 1) < 1e-10
        assert abs(np.angle(z / (np.conj(a) * a / abs(a) ** 2))) < 2 * np.arcsin(abs(a))


def test_gap_mass_point_sizes_checked():
    with pytest.raises(ValidationError):
        gap_masspoints([0.5, 0.5], sizes=(256, 128))


def test_arc_trend_for_exact_sequence():
    seq, _ = gen_constant(0.4, np.exp(0.3j))
    rep = arc_rakhmanov_trend(seq, 0.4, np.exp(0.3j), 200)
    assert np.abs(rep.modulus_gap).max() < 1e-13
    assert np.abs(rep.product_gap).max() < 1e-13


def test_arc_trend_for_decaying_perturbation():
    n = np.arange(601)
    x = 0.4 * (1 + 1 / (n + 1))
    rep = arc_rakhmanov_trend(np.minimum(x, 0.9), 0.4, 1.0, 600)
    assert rep.modulus_slope == pytest.approx(-1, abs=0.05)

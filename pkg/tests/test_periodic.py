import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import alpha_lists, disk_points
from opuc.numerics import RangeError, ValidationError
from opuc.periodic import (band_edge_growth, band_mass, bands, borg_checks, capacity, capacity_printed,
                           discriminant, dos, dos_quadrature, gap_report, lyapunov, merged_arcs, period_double,
                           periodized_det_check, potential_check, transfer_growth)

even_periods = st.integers(1, 3).flatmap(lambda q: alpha_lists(2 * q, 2 * q, 0.8))


def test_period_double():
    assert np.array_equal(period_double([0.1, 0.2j]), [0.1, 0, 0.2j, 0])
    with pytest.raises(ValidationError):
        bands([0.1, 0.2, 0.3])


def test_free_discriminant_and_density():
    th = np.linspace(0.1, 6, 7)
    assert np.allclose(discriminant([0, 0], np.exp(1j * th)), 2 * np.cos(th))
    assert np.allclose(dos([0, 0], th), 1)
    # free transfer matrices are diag(z, 1)
    assert lyapunov([0, 0], 2.0) == pytest.approx(np.log(2))
    assert lyapunov([0, 0], 0.5) == pytest.approx(0, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95))
def test_constant_sequence_band_and_capacity(a):
    bs = bands([a, a])
    assert bs.total_measure == pytest.approx(2 * np.pi - 4 * np.arcsin(a), abs=1e-9)
    # capacity of an arc of angular length 2ψ is sin(ψ/2); here ψ = π - 2 arcsin a
    assert capacity([a, a]) == pytest.approx(np.sin((np.pi - 2 * np.arcsin(a)) / 2), rel=1e-12)
    assert capacity_printed([a, a]) == pytest.approx(1 - a * a)


def test_doubled_sequence_capacity_is_preimage_capacity():
    # the z² preimage of a set of capacity c has capacity sqrt(c)
    a = 0.6
    assert capacity(period_double([a])) == pytest.approx(np.sqrt(np.sqrt(1 - a * a)))


@settings(max_examples=20, deadline=None)
@given(even_periods)
def test_band_masses(a):
    bs = bands(a)
    assert len(bs.arcs) == len(a)
    assert bs.masses == pytest.approx([1 / len(a)] * len(a), abs=1e-6)
    th, w = dos_quadrature(a, bs)
    assert w.sum() == pytest.approx(1, abs=1e-6)
    assert sum(hi - lo for lo, hi in merged_arcs(bs)) == pytest.approx(bs.total_measure, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(even_periods, disk_points(0.95).filter(lambda z: abs(z) > 0.05))
def test_lyapunov_matches_transfer_growth(a, z):
    assert lyapunov(a, z) == pytest.approx(transfer_growth(a, z, 4000), abs=2e-3)
    assert lyapunov(a, 1 / np.conj(z)) == pytest.approx(lyapunov(a, z) - np.log(abs(z)), abs=1e-10)


def test_lyapunov_vanishes_on_bands_only():
    a = [0.5, 0.5]
    assert lyapunov(a, np.exp(2.0j)) == pytest.approx(0, abs=1e-12)
    assert lyapunov(a, 1.0) > 0.1
    with pytest.raises(ValidationError):
        lyapunov(a, 0)


def test_density_in_gap_is_rejected():
    with pytest.raises(RangeError):
        dos([0.5, 0.5], 0.0)


def test_potential_identity():
    a = [0.5, 0.2j]
    rep = potential_check(a, [2.0, 0.5j, -1.5 + 0.3j])
    assert rep.max_error < 1e-9
    assert rep.max_error_printed > 1e-2


def test_periodized_determinant():
    rep = periodized_det_check([0.3, -0.2j, 0.5, 0.1], np.exp(2j * np.pi * np.arange(5) / 5))
    assert rep.max_mismatch < 1e-10
    assert rep.prefactor_error < 1e-12
    assert rep.prefactor == pytest.approx(np.prod(np.sqrt(1 - np.abs([0.3, 0.2, 0.5, 0.1]) ** 2)))


def test_generic_gaps_are_open():
    rng = np.random.default_rng(8)
    a = 0.7 * rng.random(4) * np.exp(2j * np.pi * rng.random(4))
    rep = gap_report(a)
    assert rep.n_open == 4 and sorted(rep.tags) == [-2, -2, 2, 2]


@pytest.mark.parametrize("sign,target", [(1, "repeated"), (-1, "antirepeated")])
def test_directional_borg(sign, target):
    a, b = 0.4 - 0.1j, 0.3j
    rep = borg_checks([a, b, sign * a, sign * b])
    assert rep.half_period == target and rep.directional_ok and rep.borg_ok
    assert not rep.all_closed


def test_free_period_closes_every_gap():
    rep = borg_checks([0, 0, 0, 0])
    assert rep.all_closed and rep.borg_ok


def test_band_mass_function():
    bs = bands([0.5, 0.5])
    lo, hi = bs.arcs[0]
    assert band_mass([0.5, 0.5], lo, hi) == pytest.approx(0.5, abs=1e-8)


def test_edge_growth_is_linear_with_inverse_square_root_inside():
    a = [0.5, 0.5]
    bs = bands(a)
    rep = band_edge_growth(a, bs.arcs[0][0], n_max=1000, bs=bs)
    assert rep.edge_growth_exponent == pytest.approx(1, abs=0.05)
    assert not rep.resonance
    assert rep.interior_slope == pytest.approx(-0.5, abs=0.1)
    with pytest.raises(ValidationError):
        band_edge_growth(a, 0.0)

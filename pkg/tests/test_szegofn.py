import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opuc.analysis import arc_atom_measure
from opuc.measures import measure_from_alphas
from opuc.models import gen_single_pole, single_pole_D
from opuc.numerics import ValidationError
from opuc.szegofn import (SzegoConditionError, det_formula_check, nevai_totik_report, single_pole_constant, szego_D,
                          trace_w, w1_from_alphas)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.9))
def test_trace_route_for_single_coefficient(a):
    for n in range(1, 6):
        assert abs(trace_w([a], n) - a ** n / n) < 1e-10


def test_szego_function_of_single_coefficient():
    D = szego_D(measure_from_alphas([0.5], 1))
    rho = np.sqrt(0.75)
    assert D.D0 == pytest.approx(rho)
    assert np.allclose(D.taylor(+1, 6), rho * 0.5 ** np.arange(6), atol=1e-12)
    assert np.allclose(D.taylor(-1, 3), [1 / rho, -0.5 / rho, 0], atol=1e-12)
    assert D(0.3) == pytest.approx(rho / (1 - 0.15))


def test_fourier_and_trace_routes_agree():
    a = [0.3, -0.4j, 0.2 + 0.1j]
    D = szego_D(measure_from_alphas(a, 3))
    for n in range(1, 7):
        assert abs(D.w[n] - trace_w(a, n)) < 1e-10


def test_szego_condition_failure():
    mu, _ = arc_atom_measure()
    with pytest.raises(SzegoConditionError):
        szego_D(mu)


def test_trace_needs_truncation_for_infinite_sequences():
    from opuc.szego import VerblunskySeq

    with pytest.raises(ValidationError):
        trace_w(VerblunskySeq((0.3,), "periodic"), 2)


def test_w1():
    assert w1_from_alphas([0.5, 0.2], 2) == pytest.approx(0.5 - 0.2 * 0.5)


@pytest.mark.parametrize("z", [0.3, 0.5j, -0.4 + 0.2j])
def test_determinant_formulas(z):
    rep = det_formula_check([0.5, 0.3j, -0.2], z)
    assert rep.det_error < 1e-10
    assert rep.det2_trace_error < 1e-10
    assert rep.det2_printed_error > 1e-3


def test_single_pole_coefficients_match_the_weight():
    b = 0.5
    from opuc.measures import CircleMeasure
    from opuc.numerics import CircleGrid
    from opuc.schur import alphas_from_measure

    g = CircleGrid(4096)
    w = (1 + b * b - 2 * b * np.cos(g.theta)) / (1 + b * b)
    ref = alphas_from_measure(CircleMeasure(w), 20)
    assert np.abs(gen_single_pole(b).seq.take(20) - ref).max() < 1e-12


def test_single_pole_decay():
    b = 0.5
    model = gen_single_pole(b, 60)
    rep = nevai_totik_report(model.seq, 60, model.D, pole=b)
    assert rep.fitted_b == pytest.approx(b, abs=1e-8)
    assert rep.pole_C == pytest.approx(1 - b * b, abs=1e-6)
    assert rep.fitted_C == pytest.approx(rep.pole_C, abs=1e-6)
    assert abs(rep.fitted_C_printed - rep.pole_C) > 0.1
    # the combined sequence decays strictly faster than α_n itself
    assert rep.decay_rate < 0.9 * rep.A


def test_pole_constant_needs_closed_form():
    D = szego_D(measure_from_alphas([0.5], 1))
    with pytest.raises(ValidationError):
        single_pole_constant(D, 0.5)
    assert single_pole_constant(single_pole_D(0.5), 0.5) == pytest.approx(0.75)

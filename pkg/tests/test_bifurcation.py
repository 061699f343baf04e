import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twobody.bifurcation import (
    CurveLabel,
    EquilibriumFamily,
    critical_roots,
    curve_from_equilibria,
    distance_to_bifurcation,
    equilibrium_equator_family,
    equilibrium_tan_family,
    implicit_curve_residual,
    is_on_bifurcation,
    main_curve_lhs,
    multiple_root_present,
    quartic_coeffs,
    remainder_linear_coeffs,
    solve_main_h,
    trace_diagram,
    verify_coincidence,
)
from twobody.core_model import ParamPair, casimir, hamiltonian
from twobody.errors import DomainError

# Bifurcation energies from the real roots of the quartic discriminant (sympy, exact arithmetic)
MAIN_CURVE_ORACLE = {1.0: 0.39535304490182248886, 4.0: 1.8527800038291544828}


def test_quartic_at_triple_point():
    np.testing.assert_array_equal(quartic_coeffs(ParamPair(2, 1)), [0.25, -1, 1.5, -1, 0.25])


def test_quartic_general_form():
    c, h = 3.0, -2.0
    expect = [0.25, c / 2 - 2 * h, c * c / 4 - 2 * c * h + 4 * h * h + 0.5, 2 * h - 1.5 * c, 0.25]
    np.testing.assert_allclose(quartic_coeffs(ParamPair(c, h)), expect)


def test_remainder_vanishes_at_double_root():
    # on the tangent branch h = C/2 the quartic has a double root at (C + sqrt(C^2 - 4)) / 2
    c = 5.0
    y0 = (c + math.sqrt(c * c - 4)) / 2
    lin, const = remainder_linear_coeffs(ParamPair(c, c / 2), y0)
    assert lin == pytest.approx(0.0, abs=1e-10)
    assert const == pytest.approx(0.0, abs=1e-10)


def test_remainder_is_scaled_division_remainder():
    pp = ParamPair(3.0, 0.4)
    y0 = 0.8
    _, rem = np.polydiv(quartic_coeffs(pp), np.poly([y0, y0]))
    lin, const = remainder_linear_coeffs(pp, y0)
    np.testing.assert_allclose([lin, const], 4 * rem, rtol=1e-12, atol=1e-12)


def test_critical_roots_at_triple_point():
    roots = critical_roots(ParamPair(2, 1))
    values = sorted(r.value for r in roots if r.positive)
    np.testing.assert_allclose(values, [1.0, 1.0, 1.0], atol=1e-7)
    assert roots[0].value == pytest.approx(-1 / 3)


def test_critical_roots_missing_below_tangent_threshold():
    # (C - 4h)^2 < 4 leaves only the first two critical roots real
    roots = critical_roots(ParamPair(1.0, 0.2))
    assert [r.exists for r in roots] == [True, True, False, False]


@pytest.mark.parametrize("c", sorted(MAIN_CURVE_ORACLE))
def test_solve_main_h_matches_discriminant(c):
    assert solve_main_h(c) == pytest.approx(MAIN_CURVE_ORACLE[c], abs=1e-10)


def test_solve_main_h_triple_point():
    assert solve_main_h(2.0) == pytest.approx(1.0, abs=1e-10)


def test_main_curve_sign_convention():
    h = solve_main_h(3.0)
    assert main_curve_lhs(3.0, h - 0.1) < 0 < main_curve_lhs(3.0, h + 0.1)


def test_main_curve_lhs_vectorised():
    c = np.array([1.0, 4.0])
    h = np.array([MAIN_CURVE_ORACLE[1.0], MAIN_CURVE_ORACLE[4.0]])
    assert np.max(np.abs(main_curve_lhs(c, h))) < 1e-9


def test_tan_family_equilibrium_is_fixed():
    for q in np.linspace(0.2, 2.6, 25):
        for sign in (1, -1):
            assert equilibrium_tan_family(q, sign).field_norm < 1e-9


def test_equator_family_values():
    e = equilibrium_equator_family(1.0)
    assert (casimir(e.state), hamiltonian(e.state)) == (2.0, 1.0)
    assert e.family is EquilibriumFamily.EQUATOR
    for m3 in np.linspace(0.5, 3, 11):
        e = equilibrium_equator_family(m3)
        assert hamiltonian(e.state) == casimir(e.state) / 2
        assert e.field_norm < 1e-12


def test_equator_family_rejects_zero():
    with pytest.raises(DomainError):
        equilibrium_equator_family(0.0)


def test_families_meet_at_triple_point():
    a = curve_from_equilibria("tan", math.pi / 2)
    b = curve_from_equilibria(EquilibriumFamily.EQUATOR, 1.0)
    assert a.c == pytest.approx(b.c) and a.h == pytest.approx(b.h)


def test_verify_coincidence():
    t0 = time.perf_counter()
    res = verify_coincidence(1000)
    assert res < 1e-8
    assert time.perf_counter() - t0 < 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 3.09))
def test_tan_image_on_main_curve(q):
    pp = curve_from_equilibria("tan", q)
    assert implicit_curve_residual(pp) < 1e-6 * max(1.0, pp.c)


def test_is_on_bifurcation():
    assert is_on_bifurcation(ParamPair(2, 1))
    assert is_on_bifurcation(ParamPair(6, 3))
    assert not is_on_bifurcation(ParamPair(2, -10))


def test_multiple_root_present_on_tangent_branch():
    assert multiple_root_present(ParamPair(6.0, 3.0))
    assert not multiple_root_present(ParamPair(6.0, 2.0))


def test_distance_to_bifurcation():
    assert distance_to_bifurcation(ParamPair(2, 1)) < 1e-6
    assert distance_to_bifurcation(ParamPair(4.0, MAIN_CURVE_ORACLE[4.0] + 0.01)) == pytest.approx(0.01, rel=0.3)
    assert distance_to_bifurcation(ParamPair(2, -10)) > 1


def test_trace_diagram_shape():
    d = trace_diagram(0.5, 6, 200)
    main = d.curve(CurveLabel.MAIN)
    tangent = d.curve(CurveLabel.TANGENT)
    assert main.shape == (200, 2) and tangent.shape == (200, 2)
    assert tangent[:, 0].min() == 2.0
    np.testing.assert_allclose(tangent[:, 1], tangent[:, 0] / 2)
    assert max(implicit_curve_residual(pp) for pp in d.param_pairs(CurveLabel.MAIN)) < 1e-8
    gaps = np.min(np.hypot(main[:, None, 0] - tangent[None, :, 0], main[:, None, 1] - tangent[None, :, 1]))
    assert gaps < 0.05


def test_trace_diagram_without_tangent_branch():
    d = trace_diagram(0.5, 1.5, 5)
    assert d.labels == [CurveLabel.MAIN]


def test_trace_diagram_two_vertices():
    d = trace_diagram(0.5, 6, 2)
    assert all(len(c) == 2 for c in d.curves)


def test_squared_view():
    d = trace_diagram(1, 3, 4)
    sq = d.squared_view()
    np.testing.assert_allclose(sq[0][:, 0], d.curves[0][:, 0] ** 2)

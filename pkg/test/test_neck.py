import cmath
import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from k3glue.neck import ALPHA, BETA, BulkPoint, GlueParams, INSIDE_CORE, IN_MS_BULK, IN_VS, NeckChartSpec, NeckPoint, \
    OUTSIDE_W, OutsideRegionError, SYMBOLIC, ZeroSectionError, canonicalize, class_distance, deck, exp_chart, \
    involution_F, monodromy, pullback_profile, region_of, torus_cycle_integral, transition_fs, transition_jacobian, \
    two_form_pullback_check
from k3glue.picard import MINUS, PLUS

SQRT2, SQRT3 = math.sqrt(2), math.sqrt(3)


@st.composite
def annulus_points(draw, glue: GlueParams, chart: NeckChartSpec):
    """ points of V_s = {sqrt|s|/r < |w| < sqrt|s| r} with z anywhere in a few fundamental cells """
    root = math.sqrt(abs(glue.s))
    log_modulus = draw(st.floats(min_value=-0.95, max_value=0.95)) * math.log(chart.r)
    angle = draw(st.floats(min_value=0, max_value=2 * math.pi))
    a = draw(st.floats(min_value=-2, max_value=2))
    b = draw(st.floats(min_value=-2, max_value=2))
    return NeckPoint(a + b * chart.tau, root * math.exp(log_modulus) * cmath.exp(1j * angle), chart.side)


@pytest.fixture
def chart():
    return NeckChartSpec(1j, SQRT2, SQRT3)


@pytest.fixture
def glue():
    return GlueParams(0.01, xi=0.2 + 0.1j)


PLUS_CHART = NeckChartSpec(0.3 + 1.2j, SQRT2, SQRT3)
GLUE = GlueParams(0.01 * cmath.exp(0.7j), xi=0.2 + 0.1j)


@pytest.mark.parametrize("kwargs", [
    {"tau": -1j, "p": 0.1, "q": 0.2},
    {"tau": 1j, "p": 0.1, "q": 0.2, "r": 1.0},
    {"tau": 1j, "p": 0.1, "q": 0.2, "side": "up"},
])
def test_chart_validation(kwargs):
    with pytest.raises(ValueError):
        NeckChartSpec(**kwargs)


@pytest.mark.parametrize("kwargs", [
    {"s": 0},
    {"s": 0.3},
    {"s": 0.1, "eps0": 0.05},
    {"s": 0.1, "eps0": 1.5},
])
def test_glue_params_validation(kwargs):
    with pytest.raises(ValueError):
        GlueParams(**kwargs)


def test_neck_point_side_validation():
    with pytest.raises(ValueError):
        NeckPoint(0, 1, "middle")


def test_opposite_chart(chart):
    opposite = chart.opposite()
    assert opposite.side == MINUS
    assert opposite.sign == -1
    assert opposite.opposite() == chart


def test_monodromy():
    chart = NeckChartSpec(1j, 0.25, 0.5)
    assert monodromy(chart, ALPHA) == pytest.approx(1j, abs=1e-15)
    assert monodromy(chart, BETA) == pytest.approx(-1, abs=1e-15)
    assert monodromy(chart.opposite(), ALPHA) == pytest.approx(-1j, abs=1e-15)
    with pytest.raises(ValueError):
        monodromy(chart, "gamma")


def test_deck_factor_is_a_character(chart):
    assert chart.deck_factor(2, -1) == pytest.approx(chart.deck_factor(1, 0) ** 2 / chart.deck_factor(0, 1), abs=1e-14)


def test_deck_keeps_modulus(chart):
    moved = deck(NeckPoint(0.3, 0.5j), chart, 3, -2)
    assert abs(moved.w) == pytest.approx(0.5, rel=1e-15)
    assert moved.z == pytest.approx(0.3 + 3 - 2j)


def test_canonicalize_zero_section(chart):
    with pytest.raises(ZeroSectionError):
        canonicalize(NeckPoint(0.3, 0), chart)


def test_canonicalize_fundamental_point_unchanged(chart):
    point = NeckPoint(0.3 + 0.4j, 0.2)
    assert canonicalize(point, chart) is point


@given(m=st.integers(-5, 5), n=st.integers(-5, 5))
def test_canonicalize_undoes_deck(m, n):
    point = NeckPoint(0.3 + 0.4 * PLUS_CHART.tau, 0.2 + 0.1j)
    restored = canonicalize(deck(point, PLUS_CHART, m, n), PLUS_CHART)
    assert class_distance(restored, point, PLUS_CHART) <= 1e-12
    assert abs(restored.z - point.z) <= 1e-12


@st.composite
def neck_points(draw, glue: GlueParams, chart: NeckChartSpec):
    """ points with |w| inside one of the four regions (away from its edges) and z anywhere in a few cells """
    root = math.sqrt(abs(glue.s))
    low, high = draw(st.sampled_from([(1e-3, root / chart.r), (root / chart.r, root * chart.r),
                                      (root * chart.r, chart.r), (chart.r, 3 * chart.r)]))
    fraction = draw(st.floats(min_value=0.05, max_value=0.95))
    modulus = low * (high / low) ** fraction
    angle = draw(st.floats(min_value=0, max_value=2 * math.pi))
    a = draw(st.floats(min_value=-5, max_value=5))
    b = draw(st.floats(min_value=-5, max_value=5))
    return NeckPoint(a + b * chart.tau, modulus * cmath.exp(1j * angle), chart.side)


@given(data=st.data())
def test_canonicalize_is_idempotent(data):
    point = data.draw(neck_points(GLUE, PLUS_CHART))
    canonical = canonicalize(point, PLUS_CHART)
    assert canonicalize(canonical, PLUS_CHART) == canonical


@given(data=st.data(), side=st.sampled_from([PLUS, MINUS]))
def test_canonicalize_keeps_modulus(data, side):
    chart = NeckChartSpec(PLUS_CHART.tau, SQRT2, SQRT3, side=side)
    point = data.draw(neck_points(GLUE, chart))
    assert abs(canonicalize(point, chart).w) == pytest.approx(abs(point.w), rel=1e-14)


@given(data=st.data())
def test_region_survives_canonicalize(data):
    point = data.draw(neck_points(GLUE, PLUS_CHART))
    assert region_of(canonicalize(point, PLUS_CHART), GLUE, PLUS_CHART) == region_of(point, GLUE, PLUS_CHART)


def test_class_distance_across_sides(chart):
    assert class_distance(NeckPoint(0.1, 0.2, PLUS), NeckPoint(0.1, 0.2, MINUS), chart) == math.inf


def test_region_of(chart):
    glue = GlueParams(0.01)
    assert region_of(NeckPoint(0, 0.04), glue, chart) == INSIDE_CORE
    assert region_of(NeckPoint(0, 0.05), glue, chart) == INSIDE_CORE
    assert region_of(NeckPoint(0, 0.1j), glue, chart) == IN_VS
    assert region_of(NeckPoint(0, 1), glue, chart) == IN_MS_BULK
    assert region_of(NeckPoint(0, 2), glue, chart) == OUTSIDE_W


@pytest.mark.parametrize("w", [0.01, 0.5, 3])
def test_transition_outside_annulus(chart, glue, w):
    with pytest.raises(OutsideRegionError):
        transition_fs(NeckPoint(0.2, w), glue, chart)


def test_transition_lands_on_opposite_side(chart, glue):
    image = transition_fs(NeckPoint(0.2 + 0.3j, 0.1), glue, chart)
    assert image.side == MINUS
    assert image.z == pytest.approx(0.4 + 0.4j)
    assert image.w == pytest.approx(0.1)


@given(data=st.data())
def test_transition_round_trip(data):
    point = data.draw(annulus_points(GLUE, PLUS_CHART))
    there = transition_fs(point, GLUE, PLUS_CHART)
    back = transition_fs(there, GLUE, PLUS_CHART.opposite())
    assert back.side == PLUS
    assert class_distance(back, point, PLUS_CHART) <= 1e-12


@given(data=st.data(), m=st.integers(-3, 3), n=st.integers(-3, 3))
def test_transition_is_deck_equivariant(data, m, n):
    point = data.draw(annulus_points(GLUE, PLUS_CHART))
    direct = transition_fs(point, GLUE, PLUS_CHART)
    moved = transition_fs(deck(point, PLUS_CHART, m, n), GLUE, PLUS_CHART)
    assert class_distance(direct, moved, PLUS_CHART.opposite()) <= 1e-12


def test_involution_is_an_involution():
    point = NeckPoint(0.2, 0.3j, PLUS)
    assert involution_F(point).side == MINUS
    assert involution_F(involution_F(point)) == point
    assert involution_F(BulkPoint("p7", MINUS)) == BulkPoint("p7", PLUS)


def test_jacobian_methods_agree(glue):
    point = NeckPoint(0.2 + 0.3j, 0.08 + 0.06j)
    numeric = transition_jacobian(point, glue)
    symbolic = transition_jacobian(point, glue, method=SYMBOLIC)
    np.testing.assert_allclose(symbolic, np.array([[1, 0], [0, -glue.s / point.w ** 2]]), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(numeric, symbolic, rtol=1e-7, atol=1e-7)


def test_jacobian_unknown_method(glue):
    with pytest.raises(ValueError):
        transition_jacobian(NeckPoint(0, 0.1), glue, method="automatic")


@pytest.mark.parametrize("method,tol", [("finite_difference", 1e-7), (SYMBOLIC, 1e-12)])
def test_two_form_pullback(chart, glue, method, tol):
    ratio = two_form_pullback_check(NeckPoint(0.6 + 0.1j, 0.07 - 0.09j), glue, chart, method=method)
    assert abs(ratio + 1) <= tol


def test_two_form_pullback_outside(chart, glue):
    with pytest.raises(OutsideRegionError):
        two_form_pullback_check(NeckPoint(0.6, 1.0), glue, chart)


def test_pullback_profile(chart, glue):
    points, ratios = pullback_profile(glue, chart, count=50, seed=3)
    assert points.shape == (50, 2)
    assert ratios.shape == (50,)
    assert np.all(np.abs(ratios + 1) <= 1e-7)
    again, _ = pullback_profile(glue, chart, count=50, seed=3)
    np.testing.assert_array_equal(points, again)


def test_exp_chart_periodic(chart):
    first = exp_chart(0.3, 0.1 + 0.2j, chart)
    second = exp_chart(0.3, 1.1 + 0.2j, chart)
    assert first.w == pytest.approx(second.w, abs=1e-14)
    assert abs(first.w) == pytest.approx(math.exp(-2 * math.pi * 0.2))


@given(a=st.floats(-2, 2), b=st.floats(-2, 2), x=st.floats(-1, 1), y=st.floats(-0.2, 0.2),
       l=st.integers(-2, 2), m=st.integers(-3, 3), n=st.integers(-3, 3), side=st.sampled_from([PLUS, MINUS]))
def test_exp_chart_intertwines_lattice_and_deck(a, b, x, y, l, m, n, side):
    chart = NeckChartSpec(PLUS_CHART.tau, SQRT2, SQRT3, side=side)
    z, eta = a + b * chart.tau, complex(x, y)
    base = exp_chart(z, eta, chart)
    translated = exp_chart(z + m + n * chart.tau, eta + l + m * chart.p + n * chart.q, chart)
    assert class_distance(translated, base, chart) <= 1e-12
    assert class_distance(canonicalize(translated, chart), canonicalize(base, chart), chart) <= 1e-11


@pytest.mark.parametrize("tau", [1j, 0.3 + 1.2j])
@pytest.mark.parametrize("side", [PLUS, MINUS])
def test_torus_cycle_integral(tau, side):
    chart = NeckChartSpec(tau, SQRT2, SQRT3, side=side)
    expected = chart.sign * (SQRT3 - SQRT2 * tau)
    assert torus_cycle_integral(chart) == pytest.approx(expected, abs=1e-9)


def test_torus_cycle_modulus(chart):
    with pytest.raises(ValueError):
        torus_cycle_integral(chart, modulus=2.5)

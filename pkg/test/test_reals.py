from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from k3glue.reals import FLOAT, QUADRATIC, RATIONAL, RealNumberRep, parse_real


@st.composite
def rationals(draw, max_denominator=1000):
    denominator = draw(st.integers(min_value=1, max_value=max_denominator))
    numerator = draw(st.integers(min_value=-10 * max_denominator, max_value=10 * max_denominator))
    return RealNumberRep.from_rational(numerator, denominator)


@st.composite
def quadratics(draw):
    a = draw(st.fractions(min_value=-5, max_value=5, max_denominator=20))
    b = draw(st.fractions(min_value=-5, max_value=5, max_denominator=20).filter(lambda v: v != 0))
    d = draw(st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13]))
    return RealNumberRep.quadratic(a, b, d)


def test_real_number_invalid_variant():
    with pytest.raises(ValueError):
        RealNumberRep("complex")


def test_real_number_quadratic_needs_square_free_radicand():
    with pytest.raises(ValueError):
        RealNumberRep(QUADRATIC, irrational=Fraction(1), radicand=8)


def test_real_number_quadratic_needs_irrational_part():
    with pytest.raises(ValueError):
        RealNumberRep(QUADRATIC, radicand=2)


def test_real_number_float_must_be_finite():
    with pytest.raises(ValueError):
        RealNumberRep.from_float(float("inf"))


def test_real_number_zero_denominator():
    with pytest.raises(ValueError):
        RealNumberRep.from_rational(1, 0)


def test_quadratic_normalizes_square_factors():
    value = RealNumberRep.quadratic(0, 1, 8)
    assert value.variant == QUADRATIC
    assert value.irrational == 2
    assert value.radicand == 2


def test_quadratic_perfect_square_collapses_to_rational():
    value = RealNumberRep.quadratic(1, 2, 9)
    assert value.variant == RATIONAL
    assert value.rational == 7


@pytest.mark.parametrize("text,variant,value", [
    ("1/2", RATIONAL, 0.5),
    ("6/4", RATIONAL, 1.5),
    ("-3", RATIONAL, -3.0),
    ("sqrt(2)", QUADRATIC, 2 ** 0.5),
    ("1+2*sqrt(3)", QUADRATIC, 1 + 2 * 3 ** 0.5),
    ("1/2-sqrt(5)", QUADRATIC, 0.5 - 5 ** 0.5),
    ("sqrt(9)", RATIONAL, 3.0),
    ("0.25", FLOAT, 0.25),
])
def test_parse_real(text, variant, value):
    parsed = parse_real(text)
    assert parsed.variant == variant
    assert parsed.value == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["", "abc", "sqrt(-2)", "1/0.5", "2**0.5"])
def test_parse_real_invalid(text):
    with pytest.raises(ValueError):
        parse_real(text)


@pytest.mark.parametrize("text", ["1+2*sqrt(3)", "1-2*sqrt(3)", "sqrt(2)", "-sqrt(7)", "3/4"])
def test_string_form_parses_back(text):
    assert str(parse_real(text)) == text


@given(value=rationals())
def test_rational_distance_vanishes_at_denominator(value):
    distances = value.nearest_integer_distances(np.array([value.rational.denominator]))
    assert distances[0] == 0.0


@given(value=rationals())
def test_rational_distances_are_exact_multiples(value):
    multipliers = np.arange(1, 50)
    distances = value.nearest_integer_distances(multipliers)
    expected = [min((n * value.rational) % 1, 1 - (n * value.rational) % 1) for n in range(1, 50)]
    np.testing.assert_allclose(distances, [float(e) for e in expected], rtol=0, atol=1e-15)


@given(value=quadratics())
def test_quadratic_distances_never_vanish(value):
    distances = value.nearest_integer_distances(np.arange(1, 2000))
    assert np.all(distances > 0)
    assert np.all(distances <= 0.5)


@given(value=quadratics(), shift=st.integers(min_value=-100, max_value=100))
def test_integer_shift_keeps_distances(value, shift):
    multipliers = np.arange(1, 200)
    np.testing.assert_allclose((value + shift).nearest_integer_distances(multipliers),
                               value.nearest_integer_distances(multipliers), rtol=0, atol=1e-9)


def test_float_distances():
    value = RealNumberRep.from_float(0.25)
    assert value.nearest_integer_distances(np.array([1, 2, 4])).tolist() == [0.25, 0.5, 0.0]


def test_is_integer_multiple():
    assert RealNumberRep.from_rational(1, 6).is_integer_multiple(12)
    assert not RealNumberRep.from_rational(1, 6).is_integer_multiple(4)
    assert not RealNumberRep.quadratic(0, 1, 2).is_integer_multiple(1000)


def test_partial_quotients_sqrt2():
    assert RealNumberRep.quadratic(0, 1, 2).partial_quotients(6) == [1, 2, 2, 2, 2, 2]


def test_partial_quotients_sqrt3():
    value = RealNumberRep.quadratic(0, 1, 3)
    assert value.partial_quotients(5) == [1, 1, 2, 1, 2]
    assert value.max_partial_quotient() == 2


def test_partial_quotients_rational_terminates():
    assert RealNumberRep.from_rational(3, 2).partial_quotients(10) == [1, 2]


def test_continued_fraction_of_float_rejected():
    with pytest.raises(ValueError):
        RealNumberRep.from_float(0.5).continued_fraction()


def test_max_partial_quotient_needs_quadratic():
    with pytest.raises(ValueError):
        RealNumberRep.from_rational(1, 3).max_partial_quotient()


def test_negation():
    value = parse_real("1+2*sqrt(3)")
    assert (-value).value == pytest.approx(-value.value)
    assert str(-value) == "-1-2*sqrt(3)"

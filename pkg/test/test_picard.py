import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from k3glue.elliptic import ComplexLattice, TorusPoint
from k3glue.picard import CERTIFIED_AMPLE, ComplexDivisor, DegeneratePairingError, DivisorClass, MINUS, NOT_CERTIFIED, PLUS, \
    POINTS, ampleness_grid, anticanonical, gram_matrix, intersect, involution_pullback, is_ample_uniform, match_pair, \
    matched_pairs, point_divisor, signature, xi_offset


@st.composite
def divisor_classes(draw, bound=30):
    d = draw(st.integers(min_value=-bound, max_value=bound))
    k = draw(st.lists(st.integers(min_value=-bound, max_value=bound), min_size=POINTS, max_size=POINTS))
    return DivisorClass(d, tuple(k))


@st.composite
def certified_uniform_classes(draw):
    k = draw(st.integers(min_value=2, max_value=10))
    d = draw(st.integers(min_value=3 * k + 1, max_value=3 * k + 20))
    divisor = DivisorClass.uniform(d, k)
    if not is_ample_uniform(divisor).certified:
        divisor = DivisorClass.uniform(max(d, 4 * k), k)
    return divisor


@pytest.fixture
def square():
    return ComplexLattice(1j)


def test_divisor_class_wrong_length():
    with pytest.raises(ValueError):
        DivisorClass(3, (1,) * 8)


@pytest.mark.parametrize("index", [0, 10])
def test_exceptional_index(index):
    with pytest.raises(ValueError):
        DivisorClass.exceptional(index)


def test_basic_intersections():
    h, e1 = DivisorClass.hyperplane(), DivisorClass.exceptional(1)
    assert intersect(h, h) == 1
    assert intersect(e1, e1) == -1
    assert intersect(h, e1) == 0
    assert intersect(DivisorClass.exceptional(2), e1) == 0


def test_anticanonical():
    c = anticanonical()
    assert intersect(c, c) == 0
    assert intersect(c, DivisorClass.hyperplane()) == 3
    assert all(intersect(c, DivisorClass.exceptional(i)) == 1 for i in range(1, POINTS + 1))


def test_intersection_with_anticanonical():
    assert intersect(DivisorClass.uniform(7, 2), anticanonical()) == 3


@given(first=divisor_classes(), second=divisor_classes())
def test_intersection_matches_gram_matrix(first, second):
    expected = int(first.vector() @ gram_matrix() @ second.vector())
    assert intersect(first, second) == expected == intersect(second, first)


@given(first=divisor_classes(), second=divisor_classes(), third=divisor_classes())
def test_intersection_is_bilinear(first, second, third):
    assert intersect(first + second, third) == intersect(first, third) + intersect(second, third)
    assert intersect(3 * first, third) == 3 * intersect(first, third)


def test_picard_signature():
    assert signature() == (1, 9)


def test_signature_rejects_asymmetric():
    with pytest.raises(ValueError):
        signature(np.array([[1, 2], [0, 1]]))


@pytest.mark.parametrize("divisor,verdict,reason", [
    (DivisorClass.uniform(7, 2), CERTIFIED_AMPLE, ""),
    (DivisorClass.uniform(10, 3), CERTIFIED_AMPLE, ""),
    (DivisorClass.uniform(6, 2), NOT_CERTIFIED, "d < 3k+1"),
    (DivisorClass.uniform(4, 1), NOT_CERTIFIED, "k < 2"),
    (DivisorClass(7, (2,) * 8 + (3,)), NOT_CERTIFIED, "outside the uniform-class hypothesis"),
])
def test_is_ample_uniform(divisor, verdict, reason):
    result = is_ample_uniform(divisor)
    assert result.verdict == verdict
    assert result.reason == reason


@given(divisor=certified_uniform_classes())
def test_certified_classes_meet_anticanonical_positively(divisor):
    d, k = divisor.d, divisor.k[0]
    assert intersect(divisor, anticanonical()) == 3 * d - 9 * k > 0


def test_match_pair_example():
    matches = match_pair(DivisorClass.uniform(7, 2), d_bound=13)
    assert DivisorClass.uniform(7, 2) in matches
    assert DivisorClass.uniform(10, 3) in matches
    assert DivisorClass.uniform(13, 4) in matches
    assert [m.d for m in matches] == sorted(m.d for m in matches)


def test_match_pair_only_copy():
    assert match_pair(DivisorClass.uniform(7, 2), d_bound=7) == [DivisorClass.uniform(7, 2)]


def test_match_pair_rejects_uncertified():
    with pytest.raises(ValueError):
        match_pair(DivisorClass.uniform(6, 2))


@given(divisor=certified_uniform_classes())
def test_matched_pairs_share_anticanonical_degree(divisor):
    pairs = list(matched_pairs(divisor))
    assert (divisor, divisor) in pairs
    for plus, minus in pairs:
        assert intersect(plus, anticanonical()) == intersect(minus, anticanonical())
        assert is_ample_uniform(minus).certified


@pytest.mark.parametrize("divisor", [DivisorClass.hyperplane(), DivisorClass.exceptional(3), DivisorClass.uniform(7, 2)])
def test_involution_pullback(divisor):
    assert involution_pullback(divisor, PLUS) == divisor
    assert involution_pullback(involution_pullback(divisor, PLUS), MINUS) == divisor


def test_involution_pullback_unknown_side():
    with pytest.raises(ValueError):
        involution_pullback(DivisorClass.hyperplane(), "left")


def test_xi_offset_identical_data(square):
    ample = DivisorClass.uniform(7, 2)
    points = ComplexDivisor(0, tuple(0.1 * (i + 1) + 0.05j for i in range(POINTS)))
    assert xi_offset(ample, ample, points, points, square) == 0


def test_xi_offset_perturbed_point(square):
    ample = DivisorClass.uniform(7, 2)
    points = ComplexDivisor(0, tuple(0.1 * (i + 1) + 0.05j for i in range(POINTS)))
    xi = xi_offset(ample, ample, points, points.shifted(1, 0.25), square)
    assert xi == pytest.approx(5 / 6, abs=1e-12)


def test_xi_offset_is_alternating(square):
    ample = DivisorClass.uniform(7, 2)
    plus = ComplexDivisor(0.3, tuple(0.1 * (i + 1) + 0.05j for i in range(POINTS)))
    minus = plus.shifted(4, 0.2 + 0.1j)
    forward = xi_offset(ample, ample, plus, minus, square)
    backward = xi_offset(ample, ample, minus, plus, square)
    assert square.distance_to_lattice(forward + backward) <= 1e-12


def test_xi_offset_degenerate(square):
    points = ComplexDivisor(0, (0,) * POINTS)
    with pytest.raises(DegeneratePairingError):
        xi_offset(DivisorClass.uniform(6, 2), DivisorClass.uniform(6, 2), points, points, square)
    with pytest.raises(DegeneratePairingError):
        xi_offset(DivisorClass.uniform(7, 2), DivisorClass.uniform(6, 2), points, points, square)


def test_point_divisor():
    points = [TorusPoint(0.1 * i) for i in range(POINTS)]
    divisor = point_divisor(points, TorusPoint(0.2))
    assert divisor.c_H == pytest.approx(0.6)
    assert divisor.c_E[3] == pytest.approx(0.3)
    with pytest.raises(ValueError):
        point_divisor(points[:8])


def test_ampleness_grid():
    rows = ampleness_grid(12)
    assert (7, 2, CERTIFIED_AMPLE, 3) in rows
    assert (6, 2, NOT_CERTIFIED, 0) in rows
    assert (12, 4, NOT_CERTIFIED, 0) in rows
    assert rows == sorted(rows, key=lambda row: (row[0], row[1]))
    assert all(k >= 2 and 3 * k <= d for d, k, _, _ in rows)

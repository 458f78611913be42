import math

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from k3glue.elliptic import ComplexLattice, TorusPoint
from k3glue.family import DISTINCT_CURVES, FiberCheck, FiberDescriptor, FamilyParams, SAME_CURVE_CLASS, build_fiber, \
    constraint_residual, default_p_hat, default_params, embedded_points, fibers_distinct, mirror_fiber, ninth_point, \
    sample_parameters, topology_report, verify_fiber
from k3glue.picard import MINUS, PLUS, DivisorClass, point_divisor, xi_offset
from k3glue.reals import parse_real

AMPLE = DivisorClass.uniform(7, 2)


@pytest.fixture
def base():
    return default_params()


@pytest.fixture
def fiber(base):
    return build_fiber(base, AMPLE)


def test_default_points():
    points = default_p_hat()
    assert len(points) == 8
    assert points[0] == pytest.approx(0.1 + 0.05j)
    assert len(set(points)) == 8


def test_params_validation():
    sqrt2, sqrt3 = parse_real("sqrt(2)"), parse_real("sqrt(3)")
    with pytest.raises(ValueError):
        FamilyParams(1j, default_p_hat()[:7], sqrt2, sqrt3)
    with pytest.raises(ValueError):
        FamilyParams(-1j, default_p_hat(), sqrt2, sqrt3)


def test_params_reject_refuted_pair():
    with pytest.raises(ValueError, match="witness n=6"):
        FamilyParams(1j, default_p_hat(), parse_real("1/2"), parse_real("1/3"))


def test_twist(base):
    assert base.twist == pytest.approx(math.sqrt(3) - math.sqrt(2) * 1j)


def test_ninth_point_example():
    params = FamilyParams(1j, (0j,) * 8, parse_real("sqrt(2)"), parse_real("sqrt(3)"))
    assert ninth_point(params).z == pytest.approx(0.267949 + 0.414214j, abs=1e-6)
    assert constraint_residual(params) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_constraint_holds_on_samples(seed):
    for params in sample_parameters(default_params(0.3 + 1.2j), count=10, seed=seed):
        assert constraint_residual(params) <= 1e-12


@given(m=st.integers(-3, 3), n=st.integers(-3, 3), index=st.integers(0, 7))
def test_ninth_point_ignores_lattice_shifts(m, n, index):
    base = default_params()
    shifted = tuple(p + m + n * base.tau if i == index else p for i, p in enumerate(base.p_hat))
    moved = FamilyParams(base.tau, shifted, base.p, base.q)
    assert base.lattice.distance_to_lattice(ninth_point(moved).z - ninth_point(base).z) <= 1e-12


def test_constraint_residual_detects_wrong_point(base):
    wrong = TorusPoint.of(ninth_point(base).z + 0.1, base.lattice)
    assert constraint_residual(base, wrong) == pytest.approx(0.1, abs=1e-12)


def test_build_fiber(fiber, base):
    assert len(fiber.points) == 9
    assert fiber.b0 == 3
    assert fiber.side == PLUS
    assert fiber.points[-1] == ninth_point(base)
    assert fiber.neck.p == pytest.approx(math.sqrt(2))


def test_build_fiber_requires_certified_class(base):
    with pytest.raises(ValueError, match="not certified"):
        build_fiber(base, DivisorClass.uniform(6, 2))


def test_fiber_descriptor_b0_mismatch(fiber):
    with pytest.raises(ValueError):
        FiberDescriptor(fiber.tau, fiber.points, fiber.ample, 4, fiber.neck)
    with pytest.raises(ValueError):
        FiberDescriptor(fiber.tau, fiber.points[:8], fiber.ample, 3, fiber.neck)


def test_verify_fiber(fiber):
    check = verify_fiber(fiber)
    assert check.passed
    assert check.constraint_residual <= 1e-12
    assert check.max_cubic_residual <= 1e-8


def test_fiber_check_thresholds():
    assert not FiberCheck(1e-10, True, 0.0).passed
    assert not FiberCheck(0.0, False, 0.0).passed
    assert FiberCheck(1e-10, True, 0.0, (1e-9, 1e-8)).passed


def test_mirror_fiber(fiber):
    mirror = mirror_fiber(fiber)
    assert mirror.side == MINUS
    assert mirror.ample == fiber.ample
    assert mirror.points == fiber.points
    assert verify_fiber(mirror).passed
    assert mirror_fiber(mirror) == fiber


def test_mirror_embedding_is_involution_image(fiber):
    for plus, minus in zip(embedded_points(fiber), embedded_points(mirror_fiber(fiber))):
        assert minus.coords[0] == plus.coords[0]
        assert minus.coords[1] == -plus.coords[1]


def test_mirror_offset_vanishes(fiber):
    mirror = mirror_fiber(fiber)
    offset = xi_offset(fiber.ample, mirror.ample, point_divisor(fiber.points), point_divisor(mirror.points),
                       fiber.lattice)
    assert fiber.lattice.distance_to_lattice(offset) <= 1e-12


def test_fibers_distinct():
    first = build_fiber(default_params(1j), AMPLE)
    second = build_fiber(default_params(2j), AMPLE)
    comparison = fibers_distinct(first, second)
    assert comparison.verdict == DISTINCT_CURVES
    assert comparison.j1 == pytest.approx(1728, rel=1e-9)
    assert comparison.j2 == pytest.approx(287496, rel=1e-9)


@pytest.mark.parametrize("other", [1 + 1j, -1 / (2 + 1j)])
def test_fibers_same_curve_class(other):
    first = build_fiber(default_params(1j), AMPLE)
    second = build_fiber(default_params(other), AMPLE)
    assert fibers_distinct(first, second).verdict == SAME_CURVE_CLASS


def test_topology_report(fiber):
    report = topology_report(fiber)
    assert (report.euler, report.b2, report.signature) == (12, 10, -8)
    assert topology_report(mirror_fiber(fiber)) == report


def test_sample_parameters_reproducible(base):
    first = sample_parameters(base, count=5, seed=11)
    second = sample_parameters(base, count=5, seed=11)
    assert first == second
    assert len(first) == 5
    assert all(abs(params.tau - base.tau) <= 0.05 for params in first)
    assert all(params.p == base.p and params.q == base.q for params in first)


def test_sample_parameters_validation(base):
    with pytest.raises(ValueError):
        sample_parameters(base, count=5, seed=0, radius=1.5)
    with pytest.raises(ValueError):
        sample_parameters(base, count=-1, seed=0)


def test_lattice_property(base):
    assert base.lattice == ComplexLattice(1j)

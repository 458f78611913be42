import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from k3glue.diophantine import REFUTED, check_pair
from k3glue.elliptic import (ComplexLattice, LatticeSumConfig, ProjectivePoint, TorusPoint, cubic_residual, embed,
                             involution_cp2, j_invariant, modularly_equivalent, reduce_to_fundamental_domain)
from k3glue.neck import NeckChartSpec
from k3glue.picard import (MINUS, PLUS, POINTS, DivisorClass, anticanonical, gram_matrix, intersect, involution_pullback,
                           is_ample_uniform, signature)
from k3glue.reals import RealNumberRep

logger = logging.getLogger(__name__)

FREE_POINTS = POINTS - 1
DEFAULT_RADIUS = 0.05
DEFAULT_CHART_RADIUS = 2.0
# scan length used to reject refuted pairs when parameters are built
PARAMETER_SCAN = 1000

DISTINCT_CURVES = "distinct_curves"
SAME_CURVE_CLASS = "same_curve_class"
UNDECIDED = "undecided"


@lru_cache(maxsize=128)
def _refutation_witness(p: RealNumberRep, q: RealNumberRep) -> Optional[int]:
    verdict = check_pair(p, q, PARAMETER_SCAN, certify=True)
    return verdict.witness_n if verdict.status == REFUTED else None


def default_p_hat() -> Tuple[complex, ...]:
    return tuple((0.1 + 0.05j) * (j + 1) for j in range(FREE_POINTS))


@dataclass(frozen=True)
class FamilyParams(object):
    """
    A point (tau, p̂_1, ..., p̂_8) of the parameter space together with the fixed pair (p, q)

    Args:
        tau (complex): Im(tau) > 0
        p_hat (Tuple[complex, ...]): eight points of the universal cover C
        p, q (RealNumberRep): the Diophantine pair; a pair refuted by check_pair is rejected
    """
    tau: complex
    p_hat: Tuple[complex, ...]
    p: RealNumberRep
    q: RealNumberRep

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        p_hat = tuple(complex(v) for v in self.p_hat)
        if len(p_hat) != FREE_POINTS:
            raise ValueError(f"family parameters need {FREE_POINTS} free points, got {len(p_hat)}")
        object.__setattr__(self, "p_hat", p_hat)
        if self.tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {self.tau}")
        witness = _refutation_witness(self.p, self.q)
        if witness is not None:
            raise ValueError(f"pair ({self.p}, {self.q}) fails the Diophantine condition (witness n={witness})")

    @property
    def lattice(self) -> ComplexLattice:
        return ComplexLattice(self.tau)

    @property
    def twist(self) -> complex:
        """ q - p*tau, the class of the normal bundle """
        return self.q.value - self.p.value * self.tau


@dataclass(frozen=True)
class FiberDescriptor(object):
    tau: complex
    points: Tuple[TorusPoint, ...]
    ample: DivisorClass
    b0: int
    neck: NeckChartSpec

    def __post_init__(self):
        if len(self.points) != POINTS:
            raise ValueError(f"a fiber needs {POINTS} blown-up points, got {len(self.points)}")
        if self.b0 != intersect(self.ample, anticanonical()) or self.b0 < 1:
            raise ValueError(f"b0={self.b0} does not match L.(-K) = {intersect(self.ample, anticanonical())} for L = {self.ample}")

    @property
    def lattice(self) -> ComplexLattice:
        return ComplexLattice(self.tau)

    @property
    def side(self) -> str:
        return self.neck.side


@dataclass(frozen=True)
class FiberComparison(object):
    verdict: str
    j1: complex
    j2: complex


@dataclass(frozen=True)
class TopologyReport(object):
    euler: int
    b2: int
    signature: int


@dataclass(frozen=True)
class FiberCheck(object):
    constraint_residual: float
    ample_certified: bool
    max_cubic_residual: float
    tolerances: Tuple[float, float] = field(default=(1e-12, 1e-8))

    @property
    def passed(self) -> bool:
        constraint_tol, cubic_tol = self.tolerances
        return bool(self.ample_certified and self.constraint_residual <= constraint_tol and self.max_cubic_residual <= cubic_tol)


def ninth_point(params: FamilyParams) -> TorusPoint:
    """
    Solves 9 p0 - sum p_j - p9 = q - p*tau modulo <1, tau> with p0 = [0] (the inflection point sent to [0:1:0])

    Examples:
        tau = i, all p̂_j = 0, (p, q) = (sqrt 2, sqrt 3) gives p9 = reduce(-sqrt 3 + sqrt 2 i)
    """
    return TorusPoint.of(-sum(params.p_hat) - params.twist, params.lattice)


def _constraint_residual(lattice: ComplexLattice, points: Tuple[complex, ...], twist: complex) -> float:
    return lattice.distance_to_lattice(-sum(points) - twist)


def constraint_residual(params: FamilyParams, p9: Optional[TorusPoint] = None) -> float:
    """ distance of 9 p0 - sum p_j - p9 - (q - p*tau) to the lattice """
    p9 = ninth_point(params) if p9 is None else p9
    return _constraint_residual(params.lattice, params.p_hat + (p9.z,), params.twist)


def build_fiber(params: FamilyParams, ample: DivisorClass, r: float = DEFAULT_CHART_RADIUS) -> FiberDescriptor:
    """
    Assembles the fiber over params: the eight reduced free points, the ninth point, b0 = 3d - 9k and the plus-side neck chart

    Raises:
        ValueError: if the ample class is not certified by is_ample_uniform
    """
    verdict = is_ample_uniform(ample)
    if not verdict.certified:
        raise ValueError(f"{ample} is not certified ample ({verdict.reason})")
    lattice = params.lattice
    points = tuple(TorusPoint.of(p, lattice) for p in params.p_hat) + (ninth_point(params),)
    neck = NeckChartSpec(params.tau, params.p.value, params.q.value, r, PLUS)
    return FiberDescriptor(params.tau, points, ample, intersect(ample, anticanonical()), neck)


def mirror_fiber(fiber: FiberDescriptor) -> FiberDescriptor:
    """
    The fiber on the other side: same torus coordinates (the curves are identified), pulled-back ample class and the opposite chart,
        so the translation offset of the pair is 0
    """
    side = MINUS if fiber.side == PLUS else PLUS
    return replace(fiber, ample=involution_pullback(fiber.ample, side), neck=fiber.neck.opposite())


def embedded_points(fiber: FiberDescriptor, cfg: LatticeSumConfig = LatticeSumConfig()) -> List[ProjectivePoint]:
    """ images of the nine points in CP^2; on the minus side through the involution [z1:-z2:z3] """
    images = [embed(pt, fiber.lattice, cfg) for pt in fiber.points]
    if fiber.side == MINUS:
        images = [involution_cp2(image) for image in images]
    return images


def verify_fiber(fiber: FiberDescriptor, cfg: LatticeSumConfig = LatticeSumConfig(), constraint_tol: float = 1e-12,
                 cubic_tol: float = 1e-8) -> FiberCheck:
    """ re-checks the ninth-point constraint, the ampleness certificate and the cubic residuals of the embedded points """
    twist = fiber.neck.q - fiber.neck.p * fiber.tau
    residual = _constraint_residual(fiber.lattice, tuple(pt.z for pt in fiber.points), twist)
    cubic = max(cubic_residual(image, fiber.lattice, cfg) for image in embedded_points(fiber, cfg))
    return FiberCheck(residual, is_ample_uniform(fiber.ample).certified, cubic, (constraint_tol, cubic_tol))


def _j_reduced(tau: complex, cfg: LatticeSumConfig) -> complex:
    reduced, _ = reduce_to_fundamental_domain(tau)
    return j_invariant(ComplexLattice(reduced), cfg)


def fibers_distinct(f1: FiberDescriptor, f2: FiberDescriptor, tol: float = 1e-6,
                    cfg: LatticeSumConfig = LatticeSumConfig()) -> FiberComparison:
    """
    Compares the j-invariants of the two curves (each evaluated at the fundamental-domain representative of its tau)

    Values further apart than 2 tol (relative to max(1, |j|)) mean distinct curves, hence non-isomorphic complements. Equal
        values give same_curve_class only when the two taus are modularly equivalent, otherwise the comparison is undecided.
    """
    j1, j2 = _j_reduced(f1.tau, cfg), _j_reduced(f2.tau, cfg)
    if abs(j1 - j2) > 2 * tol * max(1.0, abs(j1), abs(j2)):
        return FiberComparison(DISTINCT_CURVES, j1, j2)
    if modularly_equivalent(f1.tau, f2.tau, tol):
        return FiberComparison(SAME_CURVE_CLASS, j1, j2)
    return FiberComparison(UNDECIDED, j1, j2)


def topology_report(fiber: FiberDescriptor) -> TopologyReport:
    """ Euler number, b2 and signature of CP^2 # 9 (-CP^2), the underlying manifold of every fiber """
    gram = gram_matrix()
    positive, negative = signature(gram)
    return TopologyReport(euler=3 + POINTS, b2=int(np.linalg.matrix_rank(gram)), signature=positive - negative)


def _disc_sample(rng: np.random.Generator, radius: float) -> complex:
    return radius * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())


def sample_parameters(base: FamilyParams, count: int, seed: int, radius: float = DEFAULT_RADIUS) -> List[FamilyParams]:
    """
    Seeded draws of (tau, p̂_1, ..., p̂_8) from the discs of the given radius around the base values; (p, q) stays fixed

    Raises:
        ValueError: if the disc around tau leaves the upper half plane
    """
    if not 0 < radius < base.tau.imag:
        raise ValueError(f"sampling radius must lie in (0, Im tau) = (0, {base.tau.imag}), got {radius}")
    if count < 0:
        raise ValueError(f"sample count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(count):
        tau = base.tau + _disc_sample(rng, radius)
        p_hat = tuple(p + _disc_sample(rng, radius) for p in base.p_hat)
        samples.append(FamilyParams(tau, p_hat, base.p, base.q))
    logger.debug(f"sampled {count} parameter points around tau={base.tau} with seed {seed}")
    return samples


def default_params(tau: complex = 1j, p: Optional[RealNumberRep] = None, q: Optional[RealNumberRep] = None) -> FamilyParams:
    """ base configuration: the given tau, the spread default free points and the pair (sqrt 2, sqrt 3) """
    p = RealNumberRep.quadratic(0, 1, 2) if p is None else p
    q = RealNumberRep.quadratic(0, 1, 3) if q is None else q
    return FamilyParams(tau, default_p_hat(), p, q)

"""
Acceptance suite behind `k3glue verify-all`: one named check per verified property, each returning a CheckResult
    with the measured value and the tolerance it was held to
"""
import cmath
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, List, Tuple

import numpy as np
from scipy.special import gamma

from k3glue.diophantine import DEFAULT_N_MAX, REFUTED, check_exponential, check_pair
from k3glue.elliptic import (ComplexLattice, LatticeSumConfig, TorusPoint, cubic_residual, embed, j_invariant,
                             ode_residual, weierstrass_invariants)
from k3glue.family import (DISTINCT_CURVES, build_fiber, constraint_residual, default_params, fibers_distinct,
                           ninth_point, sample_parameters, topology_report)
from k3glue.metric import (CutoffSpec, NeckMetricSpec, completeness_slope, metric_determinant, psi_s,
                           regularized_max, ricci_check)
from k3glue.neck import (BulkPoint, GlueParams, NeckChartSpec, NeckPoint, canonicalize, class_distance, deck,
                         involution_F, transition_fs, two_form_pullback_check, SYMBOLIC)
from k3glue.picard import (DivisorClass, anticanonical, ampleness_grid, gram_matrix, intersect, match_pair, signature,
                           CERTIFIED_AMPLE, NOT_CERTIFIED)
from k3glue.reals import RealNumberRep
from k3glue.toroidal import (NOT_TOROIDAL, TOROIDAL, ThetaBundleSpec, ToroidalLattice, cocycle_residual,
                             h1_from_intersection, is_toroidal, riemann_form_check, standard_riemann_form, type_and_kind,
                             witness_products)

SAMPLE_TAUS = (1j, cmath.exp(2j * math.pi / 3), 2j, 0.3 + 1.2j)


@dataclass(frozen=True)
class Tolerances(object):
    residual: float = 1e-8
    j: float = 1e-6
    cocycle: float = 1e-9
    glue: float = 1e-10
    pullback: float = 1e-6
    ricci: float = 1e-6
    constraint: float = 1e-12

    def __post_init__(self):
        for entry in fields(self):
            value = getattr(self, entry.name)
            if not value > 0:
                raise ValueError(f"tolerance '{entry.name}' must be positive, got {value}")

    @classmethod
    def from_mapping(cls, values: Dict[str, float]) -> "Tolerances":
        known = {entry.name for entry in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"unknown tolerance names {unknown}, expected a subset of {sorted(known)}")
        return cls(**{name: float(value) for name, value in values.items()})


@dataclass(frozen=True)
class SuiteSettings(object):
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    truncation_radius: float = 100.0
    n_max: int = DEFAULT_N_MAX
    samples: int = 100

    @property
    def lattice_config(self) -> LatticeSumConfig:
        return LatticeSumConfig(truncation_radius=self.truncation_radius, target_tol=self.tolerances.residual)


@dataclass(frozen=True)
class CheckResult(object):
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _at_most(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(value <= tolerance), float(value), tolerance, detail)


def _exact(name: str, condition: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(condition), 0.0 if condition else 1.0, 0.0, detail)


def _interior_points(rng: np.random.Generator, lattice: ComplexLattice, count: int) -> np.ndarray:
    a, b = rng.uniform(0.05, 0.95, (2, count))
    return a + b * lattice.tau


def check_ode(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed)
    cfg = settings.lattice_config
    worst = 0.0
    for tau in SAMPLE_TAUS:
        lattice = ComplexLattice(tau)
        worst = max([worst] + [ode_residual(z, lattice, cfg) for z in _interior_points(rng, lattice, settings.samples)])
    return _at_most("elliptic.ode_residual", worst, settings.tolerances.residual, f"{settings.samples} points per tau")


def check_cubic(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed + 1)
    cfg = settings.lattice_config
    worst = 0.0
    for tau in SAMPLE_TAUS:
        lattice = ComplexLattice(tau)
        for z in _interior_points(rng, lattice, settings.samples):
            worst = max(worst, cubic_residual(embed(TorusPoint.of(z, lattice), lattice, cfg), lattice, cfg))
    return _at_most("elliptic.cubic_residual", worst, settings.tolerances.residual)


def check_j_square(settings: SuiteSettings) -> CheckResult:
    value = j_invariant(ComplexLattice(1j), settings.lattice_config)
    return _at_most("elliptic.j_square_lattice", abs(value - 1728) / 1728, settings.tolerances.j, "j(i) = 1728")


def check_j_hexagonal(settings: SuiteSettings) -> CheckResult:
    value = j_invariant(ComplexLattice(SAMPLE_TAUS[1]), settings.lattice_config)
    return _at_most("elliptic.j_hexagonal_lattice", abs(value), settings.tolerances.j, "j(exp(2πi/3)) = 0")


def check_lemniscatic_g2(settings: SuiteSettings) -> CheckResult:
    """ g2 of <1, i> equals Γ(1/4)^8 / (16π^2) and g3 vanishes """
    g2, g3 = weierstrass_invariants(ComplexLattice(1j), settings.lattice_config)
    expected = gamma(0.25) ** 8 / (16 * math.pi ** 2)
    error = max(abs(g2 - expected) / expected, abs(g3) / expected)
    return _at_most("elliptic.lemniscatic_invariants", error, settings.tolerances.residual)


def check_rational_refuted(settings: SuiteSettings) -> CheckResult:
    verdict = check_pair(RealNumberRep.from_rational(1, 2), RealNumberRep.from_rational(1, 3))
    return _exact("diophantine.rational_refuted", verdict.status == REFUTED and verdict.witness_n == 6,
                  f"witness n={verdict.witness_n}")


def check_sqrt_scan(settings: SuiteSettings) -> CheckResult:
    verdict = check_pair(RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3), settings.n_max)
    passed = bool(verdict.theta <= 2 and verdict.min_slack > 0)
    return CheckResult("diophantine.sqrt_pair_scan", passed, float(verdict.theta), 2.0,
                       f"A={verdict.A:.6g}, min_slack={verdict.min_slack:.6g}, "
                       f"least_squares_slack={verdict.least_squares_slack:.6g}, n_max={settings.n_max}")


def check_exponential_implication(settings: SuiteSettings) -> CheckResult:
    report = check_exponential(RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3),
                               min(settings.n_max, 10_000))
    return _exact("diophantine.exponential_implication", report.passed and bool(report.implied_by_polynomial),
                  f"c={report.c:.6g}, a={report.a:.6g}")


def check_picard_signature(settings: SuiteSettings) -> CheckResult:
    return _exact("picard.signature", signature(gram_matrix()) == (1, 9))


def check_anticanonical_square(settings: SuiteSettings) -> CheckResult:
    return _exact("picard.anticanonical_square", intersect(anticanonical(), anticanonical()) == 0)


def check_ampleness_fixtures(settings: SuiteSettings) -> CheckResult:
    verdicts = {(d, k): verdict for d, k, verdict, _ in ampleness_grid(20)}
    passed = verdicts[(7, 2)] == CERTIFIED_AMPLE and verdicts[(6, 2)] == NOT_CERTIFIED
    return _exact("picard.ampleness_grid", passed, "(7,2) certified, (6,2) not certified")


def check_matched_pairs(settings: SuiteSettings) -> CheckResult:
    plus = DivisorClass.uniform(7, 2)
    matches = match_pair(plus)
    passed = all(m.d - 3 * m.k[0] == 1 and intersect(m, anticanonical()) == 3 for m in matches)
    return _exact("picard.matched_pairs", passed, f"{len(matches)} matches of {plus}")


def check_rational_not_toroidal(settings: SuiteSettings) -> CheckResult:
    lattice = ToroidalLattice(1j, RealNumberRep.from_rational(1, 2), RealNumberRep.from_rational(1, 3))
    verdict = is_toroidal(lattice)
    products = witness_products(lattice, verdict.witness) if verdict.witness is not None else ()
    found = len(products) == 3 and np.allclose(products, (6, 3, 2), rtol=0, atol=1e-12)
    return _exact("toroidal.rational_witness", verdict.status == NOT_TOROIDAL and found,
                  f"products {[complex(v) for v in products]}")


def check_irrational_toroidal(settings: SuiteSettings) -> CheckResult:
    lattice = ToroidalLattice(1j, RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3))
    return _exact("toroidal.exact_irrational", is_toroidal(lattice).status == TOROIDAL)


def check_riemann_forms(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed + 2)
    p, q = RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3)
    taus = rng.uniform(-0.5, 0.5, 10) + 1j * rng.uniform(0.5, 2.0, 10)
    failures = [tau for tau in taus if not riemann_form_check(standard_riemann_form(tau), ToroidalLattice(tau, p, q)).ok]
    return _exact("toroidal.riemann_form", not failures, f"{len(failures)} of {len(taus)} sampled tau failed")


def check_theta_cocycle(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed + 3)
    tau = 1j
    lattice = ToroidalLattice(tau, RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3))
    spec = ThetaBundleSpec(h1_from_intersection(3, tau), lattice, rho_gen=(1, -1, 1j))
    worst = 0.0
    for _ in range(settings.samples):
        lam, mu = rng.integers(-2, 3, (2, 3))
        x = rng.uniform(0, 1, 2) + 1j * rng.uniform(0, 1, 2)
        worst = max(worst, cocycle_residual(spec, lam, mu, x))
    return _at_most("toroidal.theta_cocycle", worst, settings.tolerances.cocycle)


def check_type_kind(settings: SuiteSettings) -> CheckResult:
    lattice = ToroidalLattice(1j, RealNumberRep.quadratic(0, 1, 2), RealNumberRep.quadratic(0, 1, 3))
    return _exact("toroidal.type_kind", type_and_kind(lattice) == (1, 0))


def _neck_setup() -> Tuple[NeckChartSpec, GlueParams]:
    return NeckChartSpec(1j, math.sqrt(2), math.sqrt(3)), GlueParams(0.01, xi=0.1 + 0.05j)


def _annulus_points(rng: np.random.Generator, chart: NeckChartSpec, glue: GlueParams, count: int) -> List[NeckPoint]:
    root = math.sqrt(abs(glue.s))
    moduli = root * np.exp(rng.uniform(-0.9, 0.9, count) * math.log(chart.r))
    angles = rng.uniform(0, 2 * math.pi, count)
    return [NeckPoint(z, m * cmath.exp(1j * a), chart.side)
            for z, m, a in zip(_interior_points(rng, chart.lattice, count), moduli, angles)]


def check_deck_equivariance(settings: SuiteSettings) -> CheckResult:
    chart, glue = _neck_setup()
    rng = np.random.default_rng(settings.seed + 4)
    worst = 0.0
    for pt in _annulus_points(rng, chart, glue, settings.samples):
        m, n = (int(v) for v in rng.integers(-3, 4, 2))
        moved = deck(pt, chart, m, n)
        worst = max(worst, class_distance(transition_fs(pt, glue, chart), transition_fs(moved, glue, chart),
                                          chart.opposite()))
    return _at_most("neck.deck_equivariance", worst, settings.tolerances.glue)


def check_round_trip(settings: SuiteSettings) -> CheckResult:
    chart, glue = _neck_setup()
    rng = np.random.default_rng(settings.seed + 5)
    worst = 0.0
    for pt in _annulus_points(rng, chart, glue, settings.samples):
        back = transition_fs(transition_fs(pt, glue, chart), glue, chart.opposite())
        worst = max(worst, class_distance(back, canonicalize(pt, chart), chart))
    return _at_most("neck.round_trip", worst, settings.tolerances.glue)


def check_pullback(settings: SuiteSettings) -> CheckResult:
    chart, glue = _neck_setup()
    rng = np.random.default_rng(settings.seed + 6)
    worst = max(abs(two_form_pullback_check(pt, glue, chart) + 1)
                for pt in _annulus_points(rng, chart, glue, settings.samples))
    return _at_most("neck.two_form_pullback", worst, settings.tolerances.pullback, "finite differences")


def check_pullback_symbolic(settings: SuiteSettings) -> CheckResult:
    chart, glue = _neck_setup()
    pt = NeckPoint(0.3 + 0.4j, 0.08 + 0.05j)
    ratio = two_form_pullback_check(pt, glue, chart, method=SYMBOLIC)
    return _at_most("neck.two_form_pullback_symbolic", abs(ratio + 1), settings.tolerances.glue)


def check_involution(settings: SuiteSettings) -> CheckResult:
    pt = NeckPoint(0.25 + 0.5j, 0.1j)
    bulk = BulkPoint("interior")
    return _exact("neck.involution_squared", involution_F(involution_F(pt)) == pt and involution_F(involution_F(bulk)) == bulk)


def check_circle(settings: SuiteSettings) -> CheckResult:
    chart, glue = _neck_setup()
    root = math.sqrt(abs(glue.s))
    worst = max(abs(abs(transition_fs(NeckPoint(0.5 + 0.5j, root * cmath.exp(1j * angle)), glue, chart).w) - root) / root
                for angle in np.linspace(0, 2 * math.pi, 16, endpoint=False))
    return _at_most("neck.middle_circle", worst, settings.tolerances.glue, "|w| = sqrt|s| is preserved")


def check_regularized_max(settings: SuiteSettings) -> CheckResult:
    return _exact("metric.regularized_max_separated", regularized_max(5.0, 0.0) == 5.0)


def check_translation(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed + 7)
    worst = 0.0
    for t1, t2, a in rng.uniform(-2, 2, (5, 3)):
        worst = max(worst, abs(regularized_max(t1 + a, t2 + a) - regularized_max(t1, t2) - a))
    return _at_most("metric.regularized_max_translation", worst, settings.tolerances.glue)


def check_psi_vanishing(settings: SuiteSettings) -> CheckResult:
    s = 0.01
    cutoff = CutoffSpec()
    value = max(abs(psi_s(BulkPoint("outside"), cutoff, s)), abs(psi_s(NeckPoint(0, math.sqrt(s)), cutoff, s)))
    return _at_most("metric.psi_vanishing", value, settings.tolerances.constraint)


def _metric_fixture() -> NeckMetricSpec:
    return NeckMetricSpec(b=0.5, b0=3, tau=1j, s=0.01)


def check_determinant(settings: SuiteSettings) -> CheckResult:
    expected = 1200 / math.pi
    value = metric_determinant(NeckPoint(0, 0.1), _metric_fixture())
    return _at_most("metric.determinant", abs(value - expected) / expected, settings.tolerances.constraint)


def check_ricci(settings: SuiteSettings) -> CheckResult:
    rng = np.random.default_rng(settings.seed + 8)
    spec = _metric_fixture()
    worst = max(ricci_check(NeckPoint(0, 0.1 * cmath.exp(1j * angle)), spec)
                for angle in rng.uniform(0, 2 * math.pi, 8))
    return _at_most("metric.ricci_residual", worst, settings.tolerances.ricci)


def check_ricci_decay(settings: SuiteSettings) -> CheckResult:
    spec = _metric_fixture()
    pt = NeckPoint(0, 0.1)
    ratio = ricci_check(pt, spec, 1e-3) / ricci_check(pt, spec, 5e-4)
    return CheckResult("metric.ricci_second_order", bool(3.9 <= ratio <= 4.1), ratio, 0.1, "residual ratio under step halving")


def check_completeness(settings: SuiteSettings) -> CheckResult:
    spec = _metric_fixture()
    expected = math.sqrt(4 * spec.b / math.pi) * math.log(10)
    deviation = abs(completeness_slope(spec) - expected) / expected
    return _at_most("metric.radial_completeness", deviation, 0.01)


def check_ninth_point(settings: SuiteSettings) -> CheckResult:
    draws = sample_parameters(default_params(), 10 * settings.samples, settings.seed + 9)
    worst = max(constraint_residual(params) for params in draws)
    return _at_most("family.ninth_point_residual", worst, settings.tolerances.constraint, f"{len(draws)} draws")


def check_lattice_shift(settings: SuiteSettings) -> CheckResult:
    params = default_params()
    shifted = type(params)(params.tau, (params.p_hat[0] + 1 + params.tau,) + params.p_hat[1:], params.p, params.q)
    difference = params.lattice.distance_to_lattice(ninth_point(params).z - ninth_point(shifted).z)
    return _at_most("family.lattice_shift", difference, settings.tolerances.constraint)


def check_distinct_fibers(settings: SuiteSettings) -> CheckResult:
    ample = DivisorClass.uniform(7, 2)
    first = build_fiber(default_params(1j), ample)
    second = build_fiber(default_params(2j), ample)
    comparison = fibers_distinct(first, second, settings.tolerances.j, settings.lattice_config)
    error = abs(comparison.j1 - 1728) / 1728
    return CheckResult("family.distinct_fibers",
                       bool(comparison.verdict == DISTINCT_CURVES and error <= settings.tolerances.j),
                       error, settings.tolerances.j, f"j values {comparison.j1:.6f}, {comparison.j2:.6f}")


def check_topology(settings: SuiteSettings) -> CheckResult:
    ample = DivisorClass.uniform(7, 2)
    reports = {topology_report(build_fiber(params, ample))
               for params in sample_parameters(default_params(), 5, settings.seed + 10)}
    return _exact("family.topology", [(r.euler, r.b2, r.signature) for r in reports] == [(12, 10, -8)])


ACCEPTANCE_CHECKS: Tuple[Callable[[SuiteSettings], CheckResult], ...] = (
    check_ode, check_cubic, check_j_square, check_j_hexagonal, check_lemniscatic_g2,
    check_rational_refuted, check_sqrt_scan, check_exponential_implication,
    check_picard_signature, check_anticanonical_square, check_ampleness_fixtures, check_matched_pairs,
    check_rational_not_toroidal, check_irrational_toroidal, check_riemann_forms, check_theta_cocycle, check_type_kind,
    check_deck_equivariance, check_round_trip, check_pullback, check_pullback_symbolic, check_involution, check_circle,
    check_regularized_max, check_translation, check_psi_vanishing, check_determinant, check_ricci, check_ricci_decay,
    check_completeness,
    check_ninth_point, check_lattice_shift, check_distinct_fibers, check_topology,
)

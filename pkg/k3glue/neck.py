import math
from dataclasses import dataclass, replace
from typing import Tuple, Union

import numpy as np
import sympy

from k3glue.elliptic import ComplexLattice, exp_2pi_i
from k3glue.picard import MINUS, PLUS, SIDES

INSIDE_CORE = "inside_excluded_core"
IN_VS = "in_Vs"
IN_MS_BULK = "in_Ms_bulk"
OUTSIDE_W = "outside_W"

ALPHA = "alpha"
BETA = "beta"
LOOPS = (ALPHA, BETA)

FINITE_DIFFERENCE = "finite_difference"
SYMBOLIC = "symbolic"


class ZeroSectionError(ValueError):
    pass


class OutsideRegionError(ValueError):
    pass


@dataclass(frozen=True)
class NeckChartSpec(object):
    """
    Quotient chart W = {(z, w) : |w| < r} / ~ of a tubular neighborhood of the curve, with deck relations
        (z, w) ~ (z + 1, exp(2πi p) w) ~ (z + tau, exp(2πi q) w); the minus side uses the exponents -p, -q

    Args:
        tau (complex): Im(tau) > 0
        p, q (float): monodromy exponents
        r (float): chart radius, r > 1
        side (str): 'plus' or 'minus'
    """
    tau: complex
    p: float
    q: float
    r: float = 2.0
    side: str = PLUS

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if self.tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {self.tau}")
        if not self.r > 1:
            raise ValueError(f"chart radius must exceed 1, got {self.r}")
        if self.side not in SIDES:
            raise ValueError(f"unknown side '{self.side}'")

    @property
    def lattice(self) -> ComplexLattice:
        return ComplexLattice(self.tau)

    @property
    def sign(self) -> int:
        return 1 if self.side == PLUS else -1

    def opposite(self) -> "NeckChartSpec":
        return replace(self, side=MINUS if self.side == PLUS else PLUS)

    def deck_factor(self, m: int, n: int) -> complex:
        """ multiplier of w for the deck step z -> z + m + n*tau """
        return exp_2pi_i(self.sign * self.p * m) * exp_2pi_i(self.sign * self.q * n)


@dataclass(frozen=True)
class NeckPoint(object):
    z: complex
    w: complex
    side: str = PLUS

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w", complex(self.w))
        if self.side not in SIDES:
            raise ValueError(f"unknown side '{self.side}'")


@dataclass(frozen=True)
class BulkPoint(object):
    """ a point of M_s away from the neck, known only by a label and its side """
    label: str
    side: str = PLUS


@dataclass(frozen=True)
class GlueParams(object):
    """
    Args:
        s (complex): gluing parameter, 0 < |s| < eps0 (< 1)
        xi (complex): translation offset of the gluing
        eps0 (float): smallness threshold
    """
    s: complex
    xi: complex = 0j
    eps0: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "xi", complex(self.xi))
        if not 0 < self.eps0 <= 1:
            raise ValueError(f"eps0 must lie in (0, 1], got {self.eps0}")
        if not 0 < abs(self.s) < self.eps0:
            raise ValueError(f"gluing parameter must satisfy 0 < |s| < eps0 = {self.eps0}, got |s| = {abs(self.s)}")


def deck(pt: NeckPoint, chart: NeckChartSpec, m: int = 0, n: int = 0) -> NeckPoint:
    """ applies the deck transformation by m + n*tau """
    return NeckPoint(pt.z + m + n * chart.tau, chart.deck_factor(m, n) * pt.w, pt.side)


def canonicalize(pt: NeckPoint, chart: NeckChartSpec) -> NeckPoint:
    """
    Canonical representative: z reduced into the fundamental parallelogram, w multiplied by the inverse deck factors
        (1-steps first, then tau-steps); |w| is unchanged

    Raises:
        ZeroSectionError: if w = 0
    """
    if pt.w == 0:
        raise ZeroSectionError(f"point {pt} lies on the zero section")
    z, m, n = chart.lattice.reduce_with_shifts(pt.z)
    if m == 0 and n == 0:
        return pt
    w = pt.w * exp_2pi_i(-chart.sign * chart.p * m) * exp_2pi_i(-chart.sign * chart.q * n)
    return NeckPoint(z, w, pt.side)


def class_distance(first: NeckPoint, second: NeckPoint, chart: NeckChartSpec) -> float:
    """
    Distance between the classes of two points: the second point is moved by the deck step closest to the first,
        then the coordinate differences are combined; infinite for points on different sides
    """
    if first.side != second.side:
        return math.inf
    a, b = chart.lattice.coordinates(first.z - second.z)
    moved = deck(second, chart, int(round(a)), int(round(b)))
    return float(np.hypot(abs(first.z - moved.z), abs(first.w - moved.w)))


def monodromy(chart: NeckChartSpec, loop: str) -> complex:
    """ exp(±2πi p) along alpha, exp(±2πi q) along beta, the sign being that of the chart side """
    if loop not in LOOPS:
        raise ValueError(f"unknown loop '{loop}'")
    exponent = chart.p if loop == ALPHA else chart.q
    return exp_2pi_i(chart.sign * exponent)


def region_of(pt: NeckPoint, glue: GlueParams, chart: NeckChartSpec) -> str:
    """
    Classifies by |w|: <= sqrt|s|/r is the excluded core, < sqrt|s| r is the annulus V_s, >= r is outside W, the rest is the bulk of M_s
    """
    modulus = abs(pt.w)
    root = math.sqrt(abs(glue.s))
    if modulus <= root / chart.r:
        return INSIDE_CORE
    if modulus < root * chart.r:
        return IN_VS
    if modulus >= chart.r:
        return OUTSIDE_W
    return IN_MS_BULK


def _require_vs(pt: NeckPoint, glue: GlueParams, chart: NeckChartSpec):
    region = region_of(pt, glue, chart)
    if region != IN_VS:
        raise OutsideRegionError(f"|w|={abs(pt.w):.6g} is not in the annulus V_s (region {region})")


def transition_fs(pt: NeckPoint, glue: GlueParams, from_chart: NeckChartSpec) -> NeckPoint:
    """
    Gluing map [(z, w)] -> [(z + ξ, s/w)] from the plus side; from the minus side the inverse (z - ξ, s/w) is applied

    Raises:
        OutsideRegionError: if the point is not in V_s
    """
    _require_vs(pt, glue, from_chart)
    shift = glue.xi if from_chart.side == PLUS else -glue.xi
    target = from_chart.opposite()
    return canonicalize(NeckPoint(pt.z + shift, glue.s / pt.w, target.side), target)


def involution_F(pt: Union[NeckPoint, BulkPoint]) -> Union[NeckPoint, BulkPoint]:
    """ model of the involution of the glued surface: same chart coordinates, opposite side """
    side = MINUS if pt.side == PLUS else PLUS
    return replace(pt, side=side)


def _transition_coordinates(z: complex, w: complex, glue: GlueParams) -> np.ndarray:
    return np.array([z + glue.xi, glue.s / w])


def transition_jacobian(pt: NeckPoint, glue: GlueParams, h: float = 1e-5, method: str = FINITE_DIFFERENCE) -> np.ndarray:
    """ complex Jacobian of (z, w) -> (z + ξ, s/w), by central differences or by symbolic differentiation """
    if method == SYMBOLIC:
        z, w = sympy.symbols("z w")
        mapping = sympy.Matrix([z + sympy.sympify(glue.xi), sympy.sympify(glue.s) / w])
        jacobian = mapping.jacobian([z, w]).subs({z: sympy.sympify(pt.z), w: sympy.sympify(pt.w)}).evalf()
        return np.array([[complex(entry) for entry in row] for row in jacobian.tolist()])
    if method != FINITE_DIFFERENCE:
        raise ValueError(f"unknown differentiation method '{method}'")
    by_z = (_transition_coordinates(pt.z + h, pt.w, glue) - _transition_coordinates(pt.z - h, pt.w, glue)) / (2 * h)
    by_w = (_transition_coordinates(pt.z, pt.w + h, glue) - _transition_coordinates(pt.z, pt.w - h, glue)) / (2 * h)
    return np.column_stack([by_z, by_w])


def two_form_pullback_check(pt: NeckPoint, glue: GlueParams, chart: NeckChartSpec, h: float = 1e-5,
                            method: str = FINITE_DIFFERENCE) -> complex:
    """
    Ratio of the pullback of dz^- ∧ dw^-/w^- under the gluing to dz^+ ∧ dw^+/w^+ at pt

    Equals -1 everywhere on V_s, so η^- = -dz^- ∧ dw^-/w^- pulls back to η^+

    Raises:
        OutsideRegionError: if pt is not in V_s
        ValueError: if the Jacobian is numerically degenerate
    """
    _require_vs(pt, glue, chart)
    determinant = complex(np.linalg.det(transition_jacobian(pt, glue, h, method)))
    if abs(determinant) < np.finfo(float).eps * abs(glue.s) / abs(pt.w) ** 2:
        raise ValueError(f"degenerate transition Jacobian at {pt}")
    w_minus = glue.s / pt.w
    return (determinant / w_minus) / (1 / pt.w)


def exp_chart(z: complex, eta: complex, chart: NeckChartSpec) -> NeckPoint:
    """ [(z, η)] -> [(z, exp(2πi η))], the identification of C^2/Λ0 with the punctured chart """
    return NeckPoint(z, exp_2pi_i(chart.sign * eta), chart.side)


def torus_cycle_integral(chart: NeckChartSpec, modulus: float = 0.5, samples: int = 64) -> complex:
    """
    Integral of dz ∧ dw/w over the torus traced by z = u + v*tau, w = modulus * exp(2πi sign (p u + q v)), (u, v) in [0, 1]^2,
        divided by 2πi; the section closes up under the deck relations and the value is ±(q - p*tau)

    The pullback density is evaluated from central differences of the section on a midpoint grid
    """
    if not 0 < modulus < chart.r:
        raise ValueError(f"cycle modulus must lie in (0, r), got {modulus}")
    step = 1.0 / samples
    h = step / 8
    grid = (np.arange(samples) + 0.5) * step
    u, v = np.meshgrid(grid, grid)

    def z_of(u_, v_):
        return u_ + v_ * chart.tau

    def log_w_of(u_, v_):
        return math.log(modulus) + 2j * math.pi * chart.sign * (chart.p * u_ + chart.q * v_)

    dz_du = (z_of(u + h, v) - z_of(u - h, v)) / (2 * h)
    dz_dv = (z_of(u, v + h) - z_of(u, v - h)) / (2 * h)
    dlw_du = (log_w_of(u + h, v) - log_w_of(u - h, v)) / (2 * h)
    dlw_dv = (log_w_of(u, v + h) - log_w_of(u, v - h)) / (2 * h)
    density = dz_du * dlw_dv - dz_dv * dlw_du
    return complex(np.mean(density)) / (2j * math.pi)


def pullback_profile(glue: GlueParams, chart: NeckChartSpec, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """ pullback ratios at `count` seeded random points of V_s; returns (points as (z, w) pairs, ratios) """
    rng = np.random.default_rng(seed)
    root = math.sqrt(abs(glue.s))
    moduli = root * np.exp(rng.uniform(-0.9, 0.9, count) * math.log(chart.r))
    angles = rng.uniform(0, 2 * math.pi, count)
    coordinates = rng.uniform(0.05, 0.95, (count, 2))
    points = coordinates[:, 0] + coordinates[:, 1] * chart.tau, moduli * np.exp(1j * angles)
    ratios = np.array([two_form_pullback_check(NeckPoint(z, w, chart.side), glue, chart) for z, w in zip(*points)])
    return np.column_stack(points), ratios

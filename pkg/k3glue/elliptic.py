import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import zeta

logger = logging.getLogger(__name__)

ROWS = "rows"
DISC = "disc"
SUMMATION_METHODS = (ROWS, DISC)

# lattice coordinates this close to an integer are treated as that integer during reduction
SNAP_TOLERANCE = 1e-12
# multiple of machine epsilon times the summed magnitudes, added to every reported tail bound
ROUNDING_FACTOR = 64 * np.finfo(float).eps

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]


class PoleError(ValueError):
    pass


class SingularCurveError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSumConfig(object):
    """
    Truncation settings shared by all lattice sums

    Args:
        truncation_radius (float): lattice-norm cutoff R; for the row summation only rows with |Im λ| <= R are summed
        target_tol (float): tolerance used for residual checks and for the singular-discriminant test
        summation (str): 'rows' (closed-form sum of each lattice row) or 'disc' (literal sum over 0 < |λ| <= R)
        pole_guard (float): exclusion radius around lattice points
    """
    truncation_radius: float = 100.0
    target_tol: float = 1e-8
    summation: str = ROWS
    pole_guard: float = 1e-6

    def __post_init__(self):
        if not self.truncation_radius >= 2:
            raise ValueError(f"truncation radius must be >= 2, got {self.truncation_radius}")
        if not self.target_tol > 0:
            raise ValueError(f"target tolerance must be positive, got {self.target_tol}")
        if self.summation not in SUMMATION_METHODS:
            raise ValueError(f"unknown summation method '{self.summation}', expected one of {SUMMATION_METHODS}")
        if not self.pole_guard > 0:
            raise ValueError(f"pole guard must be positive, got {self.pole_guard}")


@dataclass(frozen=True)
class ComplexLattice(object):
    """
    The lattice <1, tau> in C with tau in the upper half plane

    Args:
        tau (complex): second generator, Im(tau) > 0
    """
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
            raise ValueError(f"non-finite tau {self.tau}")
        if tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {tau}")
        object.__setattr__(self, "tau", tau)

    def coordinates(self, z: complex) -> Tuple[float, float]:
        """ real coordinates (a, b) with z = a + b*tau """
        b = z.imag / self.tau.imag
        return z.real - b * self.tau.real, b

    def reduce_with_shifts(self, z: complex) -> Tuple[complex, int, int]:
        """
        Reduces z into the half-open fundamental parallelogram {a + b*tau : 0 <= a, b < 1}

        A point whose coordinates already lie in the parallelogram (up to SNAP_TOLERANCE below 0) is returned unchanged,
            which makes the reduction exactly idempotent; coordinates landing within SNAP_TOLERANCE of an integer after a shift are snapped to 0

        Returns:
            (reduced z, m, n) with z = reduced + m + n*tau (up to rounding)
        """
        z = complex(z)
        a, b = self.coordinates(z)
        if -SNAP_TOLERANCE <= a < 1 and -SNAP_TOLERANCE <= b < 1:
            return z, 0, 0
        m, a_reduced = self._split(a)
        n, b_reduced = self._split(b)
        return complex(a_reduced + b_reduced * self.tau), m, n

    @staticmethod
    def _split(value: float) -> Tuple[int, float]:
        shift = math.floor(value)
        remainder = value - shift
        if remainder < SNAP_TOLERANCE:
            return shift, 0.0
        if remainder > 1 - SNAP_TOLERANCE:
            return shift + 1, 0.0
        return shift, remainder

    def reduce(self, z: complex) -> complex:
        return self.reduce_with_shifts(z)[0]

    def distance_to_lattice(self, z: complex) -> float:
        """ distance from z to the nearest lattice point """
        reduced = self.reduce(z)
        return min(abs(reduced - (m + n * self.tau)) for m in range(-1, 3) for n in range(-1, 3))

    def is_lattice_point(self, z: complex, tol: float) -> bool:
        return self.distance_to_lattice(z) <= tol


@dataclass(frozen=True)
class TorusPoint(object):
    """
    A point of C/<1, tau>, stored through its reduced representative

    Use `TorusPoint.of` to build one from an arbitrary complex number
    """
    z: complex

    @classmethod
    def of(cls, z: complex, lattice: ComplexLattice) -> "TorusPoint":
        return cls(lattice.reduce(z))

    @property
    def is_zero(self) -> bool:
        return self.z == 0


@dataclass(frozen=True)
class ProjectivePoint(object):
    """ Homogeneous coordinates [z1:z2:z3] in CP^2 """
    coords: Tuple[complex, complex, complex]

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if len(coords) != 3:
            raise ValueError(f"projective points in CP^2 need 3 coordinates, got {len(coords)}")
        if all(c == 0 for c in coords):
            raise ValueError("all homogeneous coordinates are zero")
        object.__setattr__(self, "coords", coords)

    def normalized(self) -> "ProjectivePoint":
        """ scales so that the (first) largest-modulus coordinate is exactly 1 """
        index = int(np.argmax([abs(c) for c in self.coords]))
        pivot = self.coords[index]
        return ProjectivePoint(tuple(1 + 0j if i == index else c / pivot for i, c in enumerate(self.coords)))


@dataclass(frozen=True)
class LatticeSum(object):
    value: complex
    tail_bound: float


@dataclass(frozen=True)
class WeierstrassValue(object):
    p: complex
    p_prime: complex
    tail_bound: float

    def __iter__(self):
        return iter((self.p, self.p_prime))


def _csc2_cot(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    csc^2(u) and cot(u) through E = exp(2i*s*u), s = sign(Im u), so that |E| <= 1 and nothing overflows far from the real axis
    """
    u = np.asarray(u, dtype=complex)
    sign = np.where(u.imag >= 0, 1.0, -1.0)
    e = np.exp(2j * sign * u)
    csc2 = -4 * e / (1 - e) ** 2
    cot = sign * 1j * (e + 1) / (e - 1)
    return csc2, cot


@lru_cache(maxsize=None)
def _row_polynomial(k: int) -> Polynomial:
    """
    Polynomial P_k with sum_m (m + x)^(-2k) = pi^(2k) / (2k-1)! * P_k(csc^2(pi x))

    Obtained by applying (d/dx)^2, written in the variable y = csc^2(pi x), k-1 times to y:
        (d/dx)^2 p(y) = pi^2 * ((6y^2 - 4y) p'(y) + 4y^2 (y - 1) p''(y))
    """
    y = Polynomial([0, 1])
    result = y
    for _ in range(k - 1):
        result = (6 * y ** 2 - 4 * y) * result.deriv() + 4 * y ** 2 * (y - 1) * result.deriv(2)
    return result


def _row_count(lattice: ComplexLattice, cfg: LatticeSumConfig) -> int:
    return max(1, int(math.floor(cfg.truncation_radius / lattice.tau.imag)))


def _geometric_row_tail(lattice: ComplexLattice, rows: int) -> float:
    """ bound on sum_{n > rows} |csc^2(pi n tau)| """
    q = math.exp(-2 * math.pi * lattice.tau.imag)
    q_next = q ** (rows + 1)
    return 4 * q_next / ((1 - q) * (1 - q_next) ** 2)


@lru_cache(maxsize=None)
def _disc_points(tau: complex, radius: float) -> np.ndarray:
    """ non-zero lattice points m + n*tau with |m + n*tau| <= radius, in a fixed order """
    n_max = int(math.floor(radius / tau.imag))
    m_max = int(math.ceil(radius + abs(tau.real) * n_max))
    m, n = np.meshgrid(np.arange(-m_max, m_max + 1), np.arange(-n_max, n_max + 1))
    points = (m + n * tau).ravel()
    points = points[(np.abs(points) <= radius) & (points != 0)]
    points.flags.writeable = False
    return points


def _disc_tail_scale(lattice: ComplexLattice, cfg: LatticeSumConfig, shift: float = 0.0) -> float:
    """ effective inner radius of the tail region, R minus a cell diameter (and an optional shift) """
    diameter = max(abs(1 + lattice.tau), abs(1 - lattice.tau))
    return cfg.truncation_radius - diameter - shift


@lru_cache(maxsize=None)
def eisenstein(lattice: ComplexLattice, k: int, cfg: LatticeSumConfig = LatticeSumConfig()) -> LatticeSum:
    """
    Eisenstein series G_2k(<1, tau>) = sum over non-zero lattice points of λ^(-2k)

    Args:
        lattice (ComplexLattice): the lattice <1, tau>
        k (int): half the weight, k >= 2
        cfg (LatticeSumConfig): truncation settings

    Returns:
        LatticeSum with the truncated value and an estimate bounding the neglected tail plus rounding

    Raises:
        ValueError: if k < 2 or is not an integer
    """
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ValueError(f"Eisenstein series G_2k needs an integer k >= 2, got {k}")
    k = int(k)
    if cfg.summation == DISC:
        points = _disc_points(lattice.tau, cfg.truncation_radius)
        terms = points ** (-2 * k)
        value = complex(np.sum(terms))
        inner = _disc_tail_scale(lattice, cfg)
        tail = math.inf if inner <= 0 else 2 * math.pi / lattice.tau.imag * inner ** (2 - 2 * k) / (2 * k - 2)
        return LatticeSum(value, tail + ROUNDING_FACTOR * float(np.sum(np.abs(terms))))

    rows = _row_count(lattice, cfg)
    polynomial = _row_polynomial(k)
    prefactor = math.pi ** (2 * k) / math.factorial(2 * k - 1)
    csc2, _ = _csc2_cot(math.pi * lattice.tau * np.arange(1, rows + 1))
    row_sums = prefactor * polynomial(csc2)
    zeta_part = 2 * float(zeta(2 * k))
    value = zeta_part + 2 * complex(np.sum(row_sums))
    coefficient_mass = float(np.sum(np.abs(polynomial.coef)))
    tail = 2 * prefactor * coefficient_mass * _geometric_row_tail(lattice, rows)
    logger.debug(f"G_{2 * k} over {rows} rows for tau={lattice.tau}")
    return LatticeSum(value, tail + ROUNDING_FACTOR * (zeta_part + 2 * float(np.sum(np.abs(row_sums)))))


def _check_pole(z: complex, lattice: ComplexLattice, cfg: LatticeSumConfig):
    distance = lattice.distance_to_lattice(z)
    if distance < cfg.pole_guard:
        raise PoleError(f"z={z} lies within {distance:.3g} of a lattice point (pole guard {cfg.pole_guard})")


def weierstrass_p(z: complex, lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> WeierstrassValue:
    """
    Weierstrass ℘(z) = 1/z^2 + sum' (1/(z-λ)^2 - 1/λ^2) and its term-wise derivative ℘'(z) = -2 sum 1/(z-λ)^3

    z is reduced into the fundamental parallelogram first (both functions are lattice periodic)

    Raises:
        PoleError: if z is within cfg.pole_guard of a lattice point
    """
    _check_pole(z, lattice, cfg)
    z = lattice.reduce(z)
    if cfg.summation == DISC:
        points = _disc_points(lattice.tau, cfg.truncation_radius)
        p_terms = 1 / (z - points) ** 2 - 1 / points ** 2
        p_value = 1 / z ** 2 + complex(np.sum(p_terms))
        prime_terms = 1 / (z - points) ** 3
        p_prime = -2 * (1 / z ** 3 + complex(np.sum(prime_terms)))
        inner = _disc_tail_scale(lattice, cfg, abs(z))
        tail = math.inf if inner <= 0 else 2 * math.pi / lattice.tau.imag * (3 * abs(z) + 2) / inner
        rounding = ROUNDING_FACTOR * (float(np.sum(np.abs(p_terms))) + abs(p_value) + abs(p_prime))
        return WeierstrassValue(p_value, p_prime, tail + rounding)

    rows = _row_count(lattice, cfg)
    shifts = np.arange(-rows, rows + 1)
    csc2, cot = _csc2_cot(math.pi * (z - shifts * lattice.tau))
    offsets = np.empty(len(shifts), dtype=complex)
    offsets[rows] = 1 / 3
    lattice_csc2, _ = _csc2_cot(math.pi * shifts[shifts != 0] * lattice.tau)
    offsets[shifts != 0] = lattice_csc2
    p_terms = math.pi ** 2 * (csc2 - offsets)
    prime_terms = -2 * math.pi ** 3 * csc2 * cot
    p_value = complex(np.sum(p_terms))
    p_prime = complex(np.sum(prime_terms))
    # both sides of the strip; |Im(pi (z - n tau))| >= pi (|n| - 1) Im tau for the reduced z
    tail = 2 * math.pi ** 2 * 2 * _geometric_row_tail(lattice, max(rows - 1, 1)) * (1 + 2 * math.pi)
    rounding = ROUNDING_FACTOR * (float(np.sum(np.abs(p_terms))) + float(np.sum(np.abs(prime_terms))))
    return WeierstrassValue(p_value, p_prime, tail + rounding)


def weierstrass_invariants(lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> Tuple[complex, complex]:
    """ (g2, g3) = (60 G_4, 140 G_6) """
    return 60 * eisenstein(lattice, 2, cfg).value, 140 * eisenstein(lattice, 3, cfg).value


def ode_residual(z: complex, lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> float:
    """
    Relative residual of ℘'^2 = 4℘^3 - g2 ℘ - g3 at z, scaled by max(1, |℘'|^2, 4|℘|^3)
    """
    g2, g3 = weierstrass_invariants(lattice, cfg)
    p_value, p_prime = weierstrass_p(z, lattice, cfg)
    difference = p_prime ** 2 - (4 * p_value ** 3 - g2 * p_value - g3)
    return abs(difference) / max(1.0, abs(p_prime) ** 2, 4 * abs(p_value) ** 3)


def embed(pt: TorusPoint, lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> ProjectivePoint:
    """
    The embedding of C/<1, tau> into CP^2: [z] -> [℘(z) : ℘'(z) : 1], with [0] -> [0:1:0]

    Raises:
        PoleError: for a non-zero class within cfg.pole_guard of the lattice
    """
    z = lattice.reduce(pt.z)
    if z == 0:
        return ProjectivePoint((0, 1, 0))
    p_value, p_prime = weierstrass_p(z, lattice, cfg)
    return ProjectivePoint((p_value, p_prime, 1))


def cubic_residual(point: ProjectivePoint, lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> float:
    """
    |-4 z1^3 + 60 G_4 z3^2 z1 + 140 G_6 z3^3 + z2^2 z3| evaluated on the normalized coordinates

    Examples:
        >>> cubic_residual(ProjectivePoint((1, 0, 0)), ComplexLattice(1j))
        4.0
    """
    z1, z2, z3 = point.normalized().coords
    g2, g3 = weierstrass_invariants(lattice, cfg)
    return abs(-4 * z1 ** 3 + g2 * z3 ** 2 * z1 + g3 * z3 ** 3 + z2 ** 2 * z3)


def involution_cp2(point: ProjectivePoint) -> ProjectivePoint:
    """ [z1:z2:z3] -> [z1:-z2:z3], the restriction of the gluing involution to the cubic; agrees with [z] -> [-z] """
    z1, z2, z3 = point.coords
    return ProjectivePoint((z1, -z2, z3))


def j_invariant(lattice: ComplexLattice, cfg: LatticeSumConfig = LatticeSumConfig()) -> complex:
    """
    j = 1728 g2^3 / (g2^3 - 27 g3^2)

    Raises:
        SingularCurveError: if the discriminant vanishes relative to its terms within cfg.target_tol
    """
    g2, g3 = weierstrass_invariants(lattice, cfg)
    g2_cubed = g2 ** 3
    discriminant = g2_cubed - 27 * g3 ** 2
    if abs(discriminant) <= cfg.target_tol * max(abs(g2_cubed), 27 * abs(g3) ** 2):
        raise SingularCurveError(f"discriminant {discriminant} vanishes numerically for tau={lattice.tau}")
    return 1728 * g2_cubed / discriminant


def reduce_to_fundamental_domain(tau: complex, max_steps: int = 1000) -> Tuple[complex, Matrix2]:
    """
    Moves tau into the standard fundamental domain {|Re tau| <= 1/2, |tau| >= 1} of SL_2(Z)
        by alternating the translation tau -> tau - round(Re tau) and the inversion tau -> -1/tau

    Returns:
        (reduced tau, ((a, b), (c, d))) with reduced tau = (a*tau + b) / (c*tau + d)
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError(f"tau must lie in the upper half plane, got {tau}")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_steps):
        shift = round(tau.real)
        tau -= shift
        a, b = a - shift * c, b - shift * d
        if abs(tau) ** 2 < 1 - SNAP_TOLERANCE:
            tau = -1 / tau
            a, b, c, d = -c, -d, a, b
        else:
            return tau, ((a, b), (c, d))
    raise ValueError(f"fundamental domain reduction did not converge for tau={tau}")


def modularly_equivalent(tau1: complex, tau2: complex, tol: float) -> bool:
    """ True when tau1 and tau2 reduce to the same point of the fundamental domain (boundary identifications included) """
    t1, _ = reduce_to_fundamental_domain(tau1)
    t2, _ = reduce_to_fundamental_domain(tau2)
    candidates = (t2, t2 + 1, t2 - 1, -t2.conjugate())
    return any(abs(t1 - candidate) <= tol for candidate in candidates)


def exp_2pi_i(x: complex) -> complex:
    return cmath.exp(2j * math.pi * x)

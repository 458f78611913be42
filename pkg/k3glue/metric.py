import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple, Union

import numpy as np
from scipy import integrate

from k3glue.neck import (BulkPoint, GlueParams, NeckChartSpec, NeckPoint, OutsideRegionError, ZeroSectionError,
                         transition_fs)

logger = logging.getLogger(__name__)

PHI_L = "phi_L"
PHI_C = "phi_C"
ROLES = (PHI_L, PHI_C)

RADIUS_DIGITS = 14

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12


@dataclass(frozen=True)
class CutoffSpec(object):
    """
    Radii r1 < r2 < r of the cutoff; the mollified step is 1 on |x| < r2 and 0 on |x| >= r - (r - r2)/4

    Args:
        r (float): chart radius, r > 1
        r2 (float): end of the plateau, 1 < r2 < r
        r1 (float): inner radius used by the weight patching, r1 < r2
    """
    r: float = 2.0
    r2: float = 1.5
    r1: float = 1.2

    def __post_init__(self):
        if not self.r > 1:
            raise ValueError(f"cutoff radius must exceed 1, got {self.r}")
        if not 1 < self.r2 < self.r:
            raise ValueError(f"need 1 < r2 < r, got r2={self.r2}, r={self.r}")
        if not self.r1 < self.r2:
            raise ValueError(f"need r1 < r2, got r1={self.r1}, r2={self.r2}")

    @property
    def delta(self) -> float:
        return (self.r - self.r2) / 4

    @property
    def step(self) -> float:
        """ location of the jump of the unmollified step """
        return self.r - (self.r - self.r2) / 2

    @property
    def zero_from(self) -> float:
        return self.r - self.delta


@dataclass(frozen=True)
class NeckMetricSpec(object):
    """
    Model neck metric ω = (b0/Im tau) √-1 dz∧dz̄ + (2b/π) √-1 dw∧dw̄/|w|^2 on W_eps0 = {|w| < sqrt(eps0) r}

    Args:
        b (float): patching constant, b > 0
        b0 (int): L.C(tau), positive
        tau (complex): Im(tau) > 0
        s (complex): gluing parameter, 0 < |s| < eps0
        eps0 (float): smallness threshold
        r (float): chart radius
    """
    b: float
    b0: int
    tau: complex
    s: complex
    eps0: float = 0.25
    r: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "s", complex(self.s))
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if int(self.b0) != self.b0 or self.b0 < 1:
            raise ValueError(f"b0 must be a positive integer, got {self.b0}")
        if self.tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {self.tau}")
        if not 0 < abs(self.s) < self.eps0:
            raise ValueError(f"gluing parameter must satisfy 0 < |s| < eps0 = {self.eps0}, got |s| = {abs(self.s)}")

    @property
    def model_radius(self) -> float:
        return math.sqrt(self.eps0) * self.r


@dataclass(frozen=True)
class WeightSampler(object):
    """ a local plurisubharmonic weight, evaluated as a real function of a neck point """
    fn: Callable[[NeckPoint], float]
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown weight role '{self.role}', expected one of {ROLES}")

    def __call__(self, pt: NeckPoint) -> float:
        value = float(self.fn(pt))
        if not math.isfinite(value):
            raise ValueError(f"{self.role} is not finite at {pt}")
        return value


def _bump(x: float) -> float:
    if abs(x) >= 1:
        return 0.0
    return math.exp(1 / (x * x - 1))


@lru_cache(maxsize=None)
def mollifier_constant() -> float:
    """ a = 1 / ∫_{-1}^{1} exp(1/(x^2 - 1)) dx """
    integral, error = integrate.quad(_bump, -1, 1, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
    logger.debug(f"mollifier normalization integral {integral!r} (quadrature error {error:.2g})")
    return 1 / integral


def mollifier_eta(x: float) -> float:
    """
    Even bump a * exp(1/(x^2 - 1)) supported on (-1, 1), normalized to unit integral

    Examples:
        >>> mollifier_eta(1.0)
        0.0
    """
    return mollifier_constant() * _bump(x)


def _eta_cdf(t: float) -> float:
    """ ∫_{-1}^{t} η, clamped to exact 0 and 1 outside (-1, 1) """
    if t <= -1:
        return 0.0
    if t >= 1:
        return 1.0
    return integrate.quad(mollifier_eta, -1, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)[0]


def _eta_first_moment(t: float) -> float:
    """ ∫_{-1}^{t} x η(x) dx, which vanishes outside (-1, 1) """
    if t <= -1 or t >= 1:
        return 0.0
    return integrate.quad(lambda x: x * mollifier_eta(x), -1, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)[0]


def cutoff_f_tilde(x: float, spec: CutoffSpec = CutoffSpec()) -> float:
    """
    Mollified step η_δ * f with f = 1 on |x| < r - (r - r2)/2 and δ = (r - r2)/4

    Near the jump c the convolution is 1 - Φ((|x| - c)/δ), Φ being the distribution function of η; plateau values are exact

    Examples:
        >>> cutoff_f_tilde(0.75)
        1.0
    """
    return 1.0 - _eta_cdf((abs(x) - spec.step) / spec.delta)


def theta_s(t: float, s: complex) -> float:
    """ (log(t^2/|s|))^2 """
    if not t > 0:
        raise ValueError(f"theta_s needs t > 0, got {t}")
    if s == 0:
        raise ValueError("theta_s needs s != 0")
    return math.log(t * t / abs(s)) ** 2


def psi_s(pt: Union[NeckPoint, BulkPoint], spec: CutoffSpec, s: complex) -> float:
    """
    Ψ_s = f̃(|w|) θ_s(|w|) inside W, and the constant 0 outside (f̃ vanishes near |w| = r)

    Raises:
        ZeroSectionError: on the curve w = 0
    """
    if isinstance(pt, BulkPoint):
        return 0.0
    if pt.w == 0:
        raise ZeroSectionError("Ψ_s is undefined on the curve w = 0")
    modulus = abs(pt.w)
    if modulus >= spec.r:
        return 0.0
    cutoff = cutoff_f_tilde(modulus, spec)
    if cutoff == 0:
        return 0.0
    return cutoff * theta_s(modulus, s)


def regularized_max(t1: float, t2: float, gamma: Tuple[float, float] = (1.0, 1.0)) -> float:
    """
    Regularized maximum M_γ(t1, t2) = ∫∫ max(t1 + h1, t2 + h2) Π γ_j^-1 η(h_j/γ_j) dh

    The inner integral is done in closed form through Φ and the first moment of η; with D = t1 - t2 and v = (D + γ1 u)/γ2
        M = t2 + ∫ η(u) [(D + γ1 u) Φ(v) - γ2 Ψ1(v)] du.
    Returns max(t1, t2) exactly when |t1 - t2| >= γ1 + γ2.

    Raises:
        ValueError: if a component of gamma is not positive
    """
    gamma1, gamma2 = gamma
    if not (gamma1 > 0 and gamma2 > 0):
        raise ValueError(f"regularization widths must be positive, got {gamma}")
    difference = t1 - t2
    if abs(difference) >= gamma1 + gamma2:
        return max(t1, t2)

    def integrand(u: float) -> float:
        shifted = difference + gamma1 * u
        v = shifted / gamma2
        return mollifier_eta(u) * (shifted * _eta_cdf(v) - gamma2 * _eta_first_moment(v))

    correction = integrate.quad(integrand, -1, 1, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)[0]
    return t2 + correction


def patch_weights(phi_l: WeightSampler, phi_c: WeightSampler, eps: float, pt: NeckPoint) -> float:
    """ M_(1,1)(φ_L(pt), φ_C(pt) + log eps) """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return regularized_max(phi_l(pt), phi_c(pt) + math.log(eps))


def _require_model_region(pt: NeckPoint, spec: NeckMetricSpec):
    if pt.w == 0:
        raise ZeroSectionError("the neck metric is singular on w = 0")
    if abs(pt.w) >= spec.model_radius:
        raise OutsideRegionError(f"|w|={abs(pt.w):.6g} is outside the model region |w| < {spec.model_radius:.6g}")


def _metric_diagonal(w: complex, spec: NeckMetricSpec) -> Tuple[float, float]:
    return 2 * spec.b0 / spec.tau.imag, 4 * spec.b / (math.pi * abs(w) ** 2)


def neck_metric_matrix(pt: NeckPoint, spec: NeckMetricSpec) -> np.ndarray:
    """
    Coefficient matrix diag(2 b0/Im tau, 4b/(π|w|^2)) of the model metric

    Raises:
        OutsideRegionError: if |w| >= sqrt(eps0) r
        ZeroSectionError: if w = 0
    """
    _require_model_region(pt, spec)
    return np.diag(_metric_diagonal(pt.w, spec))


def metric_determinant(pt: NeckPoint, spec: NeckMetricSpec) -> float:
    """ 8 b b0/(π Im tau |w|^2) """
    _require_model_region(pt, spec)
    g_zz, g_ww = _metric_diagonal(pt.w, spec)
    return g_zz * g_ww


def radial_laplacian(fn: Callable[[float], float], rho: float, h: float) -> Tuple[float, float]:
    """ central differences (f'', f'/ρ) of a radial function f(|w|) at |w| = rho; their sum is the Laplacian in w """
    center, outer, inner = fn(rho), fn(rho + h), fn(rho - h)
    return (outer - 2 * center + inner) / h ** 2, (outer - inner) / (2 * h * rho)


def ricci_check(pt: NeckPoint, spec: NeckMetricSpec, h: float = 1e-4) -> float:
    """
    Relative residual |f'' + f'/ρ| / (|f''| + |f'/ρ|) of f(ρ) = log det g at ρ = |w|, i.e. of ∂∂̄ log det g against
        the size of its two terms; ≈ 0 since log det = const - 2 log|w|

    det g depends on |w| only, so the radial form of the Laplacian is exact. The radius is rounded to RADIUS_DIGITS
        decimals, and points on one circle give one residual.

    Raises:
        ValueError: if |w| <= 10h
        OutsideRegionError: if pt is outside the model region
    """
    _require_model_region(pt, spec)
    if not abs(pt.w) > 10 * h:
        raise ValueError(f"step h={h} is too large for |w|={abs(pt.w):.6g} (need |w| > 10h)")
    rho = round(abs(pt.w), RADIUS_DIGITS)
    reference = math.prod(_metric_diagonal(rho, spec))

    def log_ratio(radius: float) -> float:
        g_zz, g_ww = _metric_diagonal(radius, spec)
        return math.log(g_zz * g_ww / reference)

    second, first = radial_laplacian(log_ratio, rho, h)
    return abs(second + first) / (abs(second) + abs(first))


def radial_length(t0: float, t1: float, spec: NeckMetricSpec, method: str = CLOSED_FORM) -> float:
    """
    Length of the radial segment t0 <= |w| <= t1 for |v|^2 = g_ww̄ |dw(v)|^2, i.e. sqrt(4b/π) ln(t1/t0)

    Raises:
        ValueError: unless 0 < t0 < t1 < sqrt(eps0) r
    """
    if not t0 > 0:
        raise ValueError(f"radial length needs t0 > 0, got {t0}")
    if not t0 < t1 < spec.model_radius:
        raise ValueError(f"need t0 < t1 < {spec.model_radius:.6g}, got t0={t0}, t1={t1}")
    scale = math.sqrt(4 * spec.b / math.pi)
    if method == CLOSED_FORM:
        return scale * math.log(t1 / t0)
    if method == QUADRATURE:
        # substitution t = exp(u) keeps the integrand constant over many decades
        return integrate.quad(lambda u: scale, math.log(t0), math.log(t1))[0]
    raise ValueError(f"unknown method '{method}'")


def completeness_slope(spec: NeckMetricSpec, exponents: Tuple[int, ...] = tuple(range(2, 9)), t1: float = 0.1) -> float:
    """ least-squares slope of radial_length(10^-k, t1) against k; sqrt(4b/π) ln 10 for a complete end """
    lengths = [radial_length(10.0 ** -k, t1, spec) for k in exponents]
    return float(np.polyfit(np.array(exponents, dtype=float), np.array(lengths), 1)[0])


def symmetric_metric_check(pt: NeckPoint, spec: NeckMetricSpec, glue: GlueParams, chart: NeckChartSpec) -> float:
    """
    Relative mismatch between g at pt and the pullback J^H g(f_s(pt)) J along the gluing, J = diag(1, -s/w^2)

    The involution leaves the chart coordinates unchanged, so g(F(pt)) = g(pt) holds identically; the gluing is the
        non-trivial identification
    """
    image = transition_fs(pt, glue, chart)
    jacobian = np.diag([1, -glue.s / pt.w ** 2])
    pulled_back = jacobian.conj().T @ neck_metric_matrix(image, spec) @ jacobian
    here = neck_metric_matrix(pt, spec)
    return float(np.max(np.abs(pulled_back - here)) / np.max(np.abs(here)))


def cutoff_profile(spec: CutoffSpec, count: int = 201) -> Tuple[np.ndarray, np.ndarray]:
    """ samples of f̃ on [0, r] """
    xs = np.linspace(0, spec.r, count)
    return xs, np.array([cutoff_f_tilde(x, spec) for x in xs])


def psi_profile(spec: CutoffSpec, s: complex, count: int = 201) -> Tuple[np.ndarray, np.ndarray]:
    """ samples of Ψ_s along a ray, from sqrt|s|/r to r """
    ts = np.geomspace(math.sqrt(abs(s)) / spec.r, spec.r, count)
    return ts, np.array([psi_s(NeckPoint(0, t), spec, s) for t in ts])

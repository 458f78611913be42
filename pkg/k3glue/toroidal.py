import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from k3glue.reals import RealNumberRep

logger = logging.getLogger(__name__)

TOROIDAL = "toroidal"
NOT_TOROIDAL = "not_toroidal"
UNDECIDED = "undecided"

AMPLE_RIEMANN_FORM = "ample_riemann_form"
FAIL = "fail"
INTEGRALITY = "integrality"
POSITIVITY = "positivity"

INTEGRALITY_TOL = 1e-9
RANK_TOL = 1e-9


class InconsistentSemicharacterError(ValueError):
    pass


@dataclass(frozen=True)
class ToroidalLattice(object):
    """
    The discrete subgroup Λ0 = <(0,1), (1,p), (tau,q)> of C^2

    Args:
        tau (complex): Im(tau) > 0
        p, q (RealNumberRep): the monodromy exponents
    """
    tau: complex
    p: RealNumberRep
    q: RealNumberRep

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if self.tau.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {self.tau}")
        if np.linalg.matrix_rank(self.real_period_matrix(), tol=RANK_TOL) != 3:
            raise ValueError("generators of Λ0 are not linearly independent over R")

    @property
    def generators(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (np.array([0, 1], dtype=complex),
                np.array([1, self.p.value], dtype=complex),
                np.array([self.tau, self.q.value], dtype=complex))

    def real_period_matrix(self) -> np.ndarray:
        """ 4 x 3 real matrix whose columns are the generators written as (Re x, Im x, Re y, Im y) """
        return np.column_stack([_realify(g) for g in self.generators])

    def element(self, lam: Sequence[int]) -> np.ndarray:
        a, b, c = lam
        g1, g2, g3 = self.generators
        return a * g1 + b * g2 + c * g3


def _realify(vector: np.ndarray) -> np.ndarray:
    x, y = vector
    return np.array([x.real, x.imag, y.real, y.imag])


# multiplication by i on C^2 written in the real coordinates (Re x, Im x, Re y, Im y)
MULTIPLICATION_BY_I = np.array([[0, -1, 0, 0],
                                [1, 0, 0, 0],
                                [0, 0, 0, -1],
                                [0, 0, 1, 0]], dtype=float)


@dataclass(frozen=True)
class ToroidalVerdict(object):
    status: str
    witness: Optional[Tuple[complex, complex]] = None
    reason: str = ""


def is_toroidal(lat: ToroidalLattice, search_bound: int = 1000) -> ToroidalVerdict:
    """
    Decides whether C^2/Λ0 is toroidal, i.e. no σ != 0 has <σ, λ> integral on all generators

    Writing σ = (n2 - p*n1, n1), integrality on the generators means σ2 = n1, σ1 = n2 - p*n1 and (n2 - p*n1)*tau = n3 - q*n1;
        since tau is not real this forces n2 = p*n1 and n3 = q*n1. A witness therefore exists iff some n1 != 0 makes both n1*p
        and n1*q integers, in which case σ = (0, n1).

    Exact inputs are decided: rational p and q give the witness n1 = lcm of the denominators, an exact irrational coordinate
        gives toroidal. Float inputs are scanned over 1 <= n1 <= search_bound and are never declared toroidal.
    """
    if search_bound < 1:
        raise ValueError(f"search bound must be positive, got {search_bound}")
    p, q = lat.p, lat.q
    if p.is_rational and q.is_rational:
        n1 = math.lcm(p.rational.denominator, q.rational.denominator)
        return ToroidalVerdict(NOT_TOROIDAL, witness=(0j, complex(n1)), reason="p and q rational")
    if (p.is_exact and not p.is_rational) or (q.is_exact and not q.is_rational):
        return ToroidalVerdict(TOROIDAL, reason="an exact irrational coordinate rules out integral σ")
    for n1 in range(1, search_bound + 1):
        if p.is_integer_multiple(n1) and q.is_integer_multiple(n1):
            return ToroidalVerdict(NOT_TOROIDAL, witness=(0j, complex(n1)), reason=f"n1={n1} clears both coordinates")
    logger.debug(f"no witness for float pair ({p}, {q}) up to n1={search_bound}")
    return ToroidalVerdict(UNDECIDED, reason=f"no witness with |n1| <= {search_bound}")


def witness_products(lat: ToroidalLattice, witness: Tuple[complex, complex]) -> Tuple[complex, complex, complex]:
    """ <σ, λ_i> = σ1*x_i + σ2*y_i for the three generators """
    sigma = np.array(witness, dtype=complex)
    return tuple(complex(np.dot(sigma, g)) for g in lat.generators)


@dataclass(frozen=True)
class HermitianFormSpec(object):
    """
    Hermitian form H(x, y) = x^t M conj(y) on C^2

    Args:
        matrix (np.ndarray): 2 x 2 Hermitian matrix M
    """
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise ValueError(f"Hermitian form on C^2 needs a 2x2 matrix, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, rtol=0, atol=1e-14):
            raise ValueError("matrix is not Hermitian")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.asarray(x, dtype=complex) @ self.matrix @ np.conj(np.asarray(y, dtype=complex)))

    def imaginary_gram(self, lat: ToroidalLattice) -> np.ndarray:
        """ 3 x 3 real matrix Im H(λ_i, λ_j) on the generators """
        generators = lat.generators
        return np.array([[self(gi, gj).imag for gj in generators] for gi in generators])


@dataclass(frozen=True)
class RiemannFormVerdict(object):
    verdict: str
    failed: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == AMPLE_RIEMANN_FORM


def riemann_form_check(form: HermitianFormSpec, lat: ToroidalLattice) -> RiemannFormVerdict:
    """
    Ample Riemann form conditions: Im H integral on all generator pairs, and H positive definite on the maximal
        complex subspace {(x, 0)} of the R-span of Λ0 (i.e. M_11 > 0)
    """
    gram = form.imaginary_gram(lat)
    if not np.all(np.abs(gram - np.rint(gram)) <= INTEGRALITY_TOL):
        return RiemannFormVerdict(FAIL, INTEGRALITY)
    if not form.matrix[0, 0].real > 0:
        return RiemannFormVerdict(FAIL, POSITIVITY)
    return RiemannFormVerdict(AMPLE_RIEMANN_FORM)


def standard_riemann_form(tau: complex) -> HermitianFormSpec:
    return HermitianFormSpec(np.diag([1 / complex(tau).imag, 0]))


def first_chern_number(form: HermitianFormSpec, lat: ToroidalLattice) -> float:
    """ M_11 * Im tau, the curvature of H integrated over the parallelogram spanned by 1 and tau """
    return float(form.matrix[0, 0].real * lat.tau.imag)


def type_and_kind(lat: ToroidalLattice, form: Optional[HermitianFormSpec] = None) -> Tuple[int, int]:
    """
    Type and kind of the toroidal group C^2/Λ0

    type = complex dimension of the maximal complex subspace of R_Λ0 (half the real dimension of R_Λ0 ∩ i R_Λ0);
    kind = (rank of Im G on R_Λ0 - 2 type) / 2, with G the ample Riemann form (diag(1/Im tau, 0) by default)

    Raises:
        ValueError: if the R-span is degenerate or the computed numbers are inconsistent
    """
    real_span = lat.real_period_matrix()
    span_rank = int(np.linalg.matrix_rank(real_span, tol=RANK_TOL))
    if span_rank != 3:
        raise ValueError(f"R-span of Λ0 has rank {span_rank}, expected 3")
    rotated = MULTIPLICATION_BY_I @ real_span
    joint_rank = int(np.linalg.matrix_rank(np.hstack([real_span, rotated]), tol=RANK_TOL))
    complex_dimension = 2 * span_rank - joint_rank
    if complex_dimension % 2:
        raise ValueError(f"R_Λ0 ∩ iR_Λ0 has odd real dimension {complex_dimension}")
    group_type = complex_dimension // 2
    form = form if form is not None else standard_riemann_form(lat.tau)
    imaginary_rank = int(np.linalg.matrix_rank(form.imaginary_gram(lat), tol=RANK_TOL))
    if (imaginary_rank - 2 * group_type) % 2:
        raise ValueError(f"rank of Im G ({imaginary_rank}) and type ({group_type}) give a non-integral kind")
    return group_type, (imaginary_rank - 2 * group_type) // 2


def stein_summary(group_type: int, kind: int) -> str:
    """ description of the Stein-subgroup fibration implied by (type, kind) for n = 2 """
    if (group_type, kind) == (1, 0):
        return "K ≅ C*, U0/K is an abelian variety of dimension 1"
    return f"unsupported (type, kind) = ({group_type}, {kind}) for this lattice family"


@dataclass(frozen=True)
class ThetaBundleSpec(object):
    """
    Data (H1, ρ) of the theta line bundle on C^2/Λ0

    Args:
        h1 (HermitianFormSpec): Hermitian form with Im H1 integral on the generators
        lattice (ToroidalLattice): Λ0
        rho_gen (Tuple[complex, complex, complex]): unit values of the semicharacter on λ1, λ2, λ3

    Raises:
        InconsistentSemicharacterError: if Im H1 is not integral on generator pairs
    """
    h1: HermitianFormSpec
    lattice: ToroidalLattice
    rho_gen: Tuple[complex, complex, complex] = (1, 1, 1)

    def __post_init__(self):
        rho_gen = tuple(complex(v) for v in self.rho_gen)
        if len(rho_gen) != 3 or any(abs(abs(v) - 1) > 1e-12 for v in rho_gen):
            raise ValueError(f"semicharacter values must be three unit complex numbers, got {self.rho_gen}")
        object.__setattr__(self, "rho_gen", rho_gen)
        gram = self.h1.imaginary_gram(self.lattice)
        rounded = np.rint(gram)
        if not np.all(np.abs(gram - rounded) <= INTEGRALITY_TOL):
            raise InconsistentSemicharacterError(f"Im H1 is not integral on the generators: {gram.tolist()}")
        object.__setattr__(self, "_integral_gram", rounded.astype(np.int64))


def semicharacter(spec: ThetaBundleSpec, lam: Sequence[int]) -> complex:
    """
    ρ(aλ1 + bλ2 + cλ3) from the rule ρ(λ + μ) = ρ(λ)ρ(μ)exp(πi Im H1(λ, μ)) applied left to right in the order λ1, λ2, λ3:
        ρ = ρ1^a ρ2^b ρ3^c exp(πi (ab E12 + ac E13 + bc E23)) with E_ij = Im H1(λ_i, λ_j)
    """
    a, b, c = (int(v) for v in lam)
    e = spec._integral_gram
    rho1, rho2, rho3 = spec.rho_gen
    parity = (a * b * e[0, 1] + a * c * e[0, 2] + b * c * e[1, 2]) % 2
    return rho1 ** a * rho2 ** b * rho3 ** c * (-1) ** int(parity)


def theta_factor(spec: ThetaBundleSpec, lam: Sequence[int], x: Sequence[complex]) -> complex:
    """
    Factor of automorphy α_λ(x) = ρ(λ) exp(π H1(x, λ) + (π/2) H1(λ, λ)); α_0 = 1
    """
    element = spec.lattice.element(lam)
    x = np.asarray(x, dtype=complex)
    exponent = math.pi * spec.h1(x, element) + (math.pi / 2) * spec.h1(element, element)
    return semicharacter(spec, lam) * cmath.exp(exponent)


def cocycle_residual(spec: ThetaBundleSpec, lam: Sequence[int], mu: Sequence[int], x: Sequence[complex]) -> float:
    """ |α_{λ+μ}(x) - α_λ(x + μ) α_μ(x)| relative to |α_{λ+μ}(x)| """
    combined = tuple(a + b for a, b in zip(lam, mu))
    x = np.asarray(x, dtype=complex)
    left = theta_factor(spec, combined, x)
    right = theta_factor(spec, lam, x + spec.lattice.element(mu)) * theta_factor(spec, mu, x)
    return abs(left - right) / max(abs(left), 1.0)


def h1_from_intersection(b0: int, tau: complex) -> HermitianFormSpec:
    """
    H1 = diag(b0 / Im tau, 0) for the bundle whose degree on the curve direction is b0 = L.C

    Raises:
        ValueError: if b0 is not a positive integer
    """
    if int(b0) != b0 or b0 <= 0:
        raise ValueError(f"b0 must be a positive integer, got {b0}")
    return HermitianFormSpec(np.diag([b0 / complex(tau).imag, 0]))

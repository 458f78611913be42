from dataclasses import dataclass
from itertools import count
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np

from k3glue.elliptic import ComplexLattice, TorusPoint

POINTS = 9
RANK = POINTS + 1
DEFAULT_D_BOUND = 50

PLUS = "plus"
MINUS = "minus"
SIDES = (PLUS, MINUS)

CERTIFIED_AMPLE = "certified_ample"
NOT_CERTIFIED = "not_certified"


class DegeneratePairingError(ValueError):
    pass


@dataclass(frozen=True)
class DivisorClass(object):
    """
    Integer class d*H - sum k_i*E_i in the Picard lattice of CP^2 blown up at nine points

    The intersection form is H.H = 1, H.E_i = 0, E_i.E_j = -δ_ij

    Args:
        d (int): coefficient of H
        k (Tuple[int, ...]): nine coefficients, stored with the sign convention of d*H - sum k_i*E_i

    Example:
        DivisorClass(7, (2,) * 9) is 7H - 2(E_1 + ... + E_9)
    """
    d: int
    k: Tuple[int, ...] = (0,) * POINTS

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if len(k) != POINTS:
            raise ValueError(f"divisor class needs {POINTS} exceptional coefficients, got {len(k)}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def uniform(cls, d: int, k: int) -> "DivisorClass":
        return cls(d, (k,) * POINTS)

    @classmethod
    def hyperplane(cls) -> "DivisorClass":
        return cls(1)

    @classmethod
    def exceptional(cls, index: int) -> "DivisorClass":
        """ E_index for index in 1..9 (so k_index = -1) """
        if not 1 <= index <= POINTS:
            raise ValueError(f"exceptional divisors are numbered 1..{POINTS}, got {index}")
        return cls(0, tuple(-1 if i == index - 1 else 0 for i in range(POINTS)))

    @property
    def is_uniform(self) -> bool:
        return len(set(self.k)) == 1

    def vector(self) -> np.ndarray:
        """ coordinates (d, -k_1, ..., -k_9) in the basis H, E_1, ..., E_9 """
        return np.array((self.d,) + tuple(-v for v in self.k), dtype=np.int64)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(self.d + other.d, tuple(a + b for a, b in zip(self.k, other.k)))

    def __rmul__(self, factor: int) -> "DivisorClass":
        return DivisorClass(factor * self.d, tuple(factor * v for v in self.k))

    def __str__(self) -> str:
        if self.is_uniform:
            return f"{self.d}H-{self.k[0]}ΣE"
        return f"{self.d}H-" + "-".join(f"{v}E{i + 1}" for i, v in enumerate(self.k))


@dataclass(frozen=True)
class ComplexDivisor(object):
    """
    Complex-coefficient class c_H*H - sum c_E_i*E_i; pairs with integer classes through the C-bilinear extension of the form
    """
    c_H: complex
    c_E: Tuple[complex, ...]

    def __post_init__(self):
        c_E = tuple(complex(v) for v in self.c_E)
        if len(c_E) != POINTS:
            raise ValueError(f"complex divisor needs {POINTS} exceptional coefficients, got {len(c_E)}")
        object.__setattr__(self, "c_E", c_E)
        object.__setattr__(self, "c_H", complex(self.c_H))

    def shifted(self, index: int, amount: complex) -> "ComplexDivisor":
        """ adds `amount` to the coefficient of E_index (1-based) """
        return ComplexDivisor(self.c_H, tuple(v + amount if i == index - 1 else v for i, v in enumerate(self.c_E)))


def intersect(first: Union[DivisorClass, ComplexDivisor], second: DivisorClass) -> Union[int, complex]:
    """
    Intersection number under H.H = 1, E_i.E_j = -δ_ij

    Examples:
        >>> intersect(DivisorClass.uniform(7, 2), anticanonical())
        3
    """
    if isinstance(first, ComplexDivisor):
        return first.c_H * second.d - sum(c * k for c, k in zip(first.c_E, second.k))
    return first.d * second.d - sum(a * b for a, b in zip(first.k, second.k))


def anticanonical() -> DivisorClass:
    """ -K = 3H - sum E_i, the class of the strict transform of the cubic """
    return DivisorClass.uniform(3, 1)


def gram_matrix() -> np.ndarray:
    """ 10 x 10 Gram matrix of the form in the basis H, E_1, ..., E_9 """
    return np.diag([1] + [-1] * POINTS).astype(np.int64)


def signature(matrix: np.ndarray = None) -> Tuple[int, int]:
    """ (positive, negative) eigenvalue counts of a symmetric matrix (the Picard form by default) """
    matrix = gram_matrix() if matrix is None else np.asarray(matrix)
    if not np.array_equal(matrix, matrix.T):
        raise ValueError("signature is only defined for symmetric matrices")
    eigenvalues = np.linalg.eigvalsh(matrix.astype(float))
    return int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0))


@dataclass(frozen=True)
class AmplenessVerdict(object):
    verdict: str
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED_AMPLE


def is_ample_uniform(divisor: DivisorClass) -> AmplenessVerdict:
    """
    Sufficient ampleness criterion for uniform classes d*H - k*sum E_i: k >= 2, d >= 3k + 1 and d^2/k^2 - 1 >= 9

    The last inequality is compared as d^2 >= 10 k^2, so the decision never leaves the integers. Failing the criterion
        means "not certified", never "not ample".

    Examples:
        >>> is_ample_uniform(DivisorClass.uniform(6, 2)).reason
        'd < 3k+1'
    """
    if not divisor.is_uniform:
        return AmplenessVerdict(NOT_CERTIFIED, "outside the uniform-class hypothesis")
    d, k = divisor.d, divisor.k[0]
    if k < 2:
        return AmplenessVerdict(NOT_CERTIFIED, "k < 2")
    if d < 3 * k + 1:
        return AmplenessVerdict(NOT_CERTIFIED, "d < 3k+1")
    if d * d < 10 * k * k:
        return AmplenessVerdict(NOT_CERTIFIED, "d^2/k^2 - 1 < 9")
    return AmplenessVerdict(CERTIFIED_AMPLE)


def match_pair(plus: DivisorClass, d_bound: int = DEFAULT_D_BOUND) -> List[DivisorClass]:
    """
    Uniform classes d'H - k'ΣE with d' - 3k' = d - 3k (equal intersection with -K), d' <= d_bound, certified by is_ample_uniform

    The input itself is always part of the result, which is ordered by d'

    Raises:
        ValueError: if the input is not uniform or not certified ample
    """
    if not is_ample_uniform(plus).certified:
        raise ValueError(f"{plus} is not a certified ample uniform class")
    offset = plus.d - 3 * plus.k[0]
    matches = [plus]
    for k in count(2):
        d = offset + 3 * k
        if d > d_bound:
            break
        candidate = DivisorClass.uniform(d, k)
        if candidate != plus and is_ample_uniform(candidate).certified:
            matches.append(candidate)
    return sorted(matches, key=lambda c: c.d)


def matched_pairs(plus: DivisorClass, d_bound: int = DEFAULT_D_BOUND) -> Iterator[Tuple[DivisorClass, DivisorClass]]:
    for minus in match_pair(plus, d_bound):
        yield plus, minus


def involution_pullback(divisor: DivisorClass, side: str = PLUS) -> DivisorClass:
    """ pullback under the gluing involution, which sends H and E_i of one side to H and E_i of the other """
    if side not in SIDES:
        raise ValueError(f"unknown side '{side}'")
    return DivisorClass(divisor.d, divisor.k)


def xi_offset(l_plus: DivisorClass, l_minus: DivisorClass, p_plus: ComplexDivisor, p_minus: ComplexDivisor,
              lattice: ComplexLattice) -> complex:
    """
    Translation offset ξ = (p^-.L^- - p^+.L^+) / b0 of the gluing, reduced modulo <1, tau>

    Raises:
        DegeneratePairingError: if the two classes meet -K differently or b0 = 0
    """
    b_plus, b_minus = intersect(l_plus, anticanonical()), intersect(l_minus, anticanonical())
    if b_plus != b_minus:
        raise DegeneratePairingError(f"classes meet -K differently: {b_plus} != {b_minus}")
    if b_plus == 0:
        raise DegeneratePairingError("b0 = L.(-K) vanishes")
    return lattice.reduce((intersect(p_minus, l_minus) - intersect(p_plus, l_plus)) / b_plus)


def point_divisor(points: Sequence[TorusPoint], base: TorusPoint = TorusPoint(0)) -> ComplexDivisor:
    """ p = 3*p0*H - sum p_i*E_i built from the nine reduced torus representatives """
    if len(points) != POINTS:
        raise ValueError(f"need {POINTS} points, got {len(points)}")
    return ComplexDivisor(3 * base.z, tuple(pt.z for pt in points))


def ampleness_grid(d_max: int) -> List[Tuple[int, int, str, int]]:
    """
    Rows (d, k, verdict, 3d - 9k) for k >= 2 and 3k <= d <= d_max, ordered by (d, k)
    """
    rows = []
    for d in range(1, d_max + 1):
        for k in range(2, d // 3 + 1):
            verdict = is_ample_uniform(DivisorClass.uniform(d, k))
            rows.append((d, k, verdict.verdict, 3 * d - 9 * k))
    return rows

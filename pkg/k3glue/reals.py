import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, cycle, islice
from typing import Iterator, List, Tuple, Union

import numpy as np
from sympy.ntheory.continued_fraction import continued_fraction_periodic
from sympy.ntheory.factor_ import core

RATIONAL = "rational"
QUADRATIC = "quadratic"
FLOAT = "float"
VARIANTS = (RATIONAL, QUADRATIC, FLOAT)

# products n * numerator above this bound are evaluated with python integers instead of int64
_INT64_SAFE = 2 ** 62

# Named groups for the command line syntax of real numbers:
#   `a/b`, `a`, `a+b*sqrt(d)`, `b*sqrt(d)`, `sqrt(d)`, `a-sqrt(d)`, `a+b/c*sqrt(d)`
RATIONAL_REGEX = re.compile(r'^(?P<num>[+-]?\d+)(?:/(?P<den>\d+))?$')
QUADRATIC_REGEX = re.compile(r'^(?:(?P<a>[+-]?\d+(?:/\d+)?)(?=[+-]))?'
                             r'(?P<sign>[+-]?)(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\)$')


@dataclass(frozen=True)
class RealNumberRep(object):
    """
    Exact-or-float representation of a real number, used wherever a decision (rational or not, zero or not) has to be made

    Three variants are supported:
        * rational: `rational` holds the value as a Fraction (always in lowest terms)
        * quadratic: the value a + b*sqrt(d), with a = `rational`, b = `irrational` (non-zero), d = `radicand` (square-free, >= 2)
        * float: `approximation` holds a finite float; nothing is ever decided exactly for this variant

    Instances should be built with the `rational`, `quadratic` and `from_float` factories (or `parse_real`),
        which normalize the radicand and collapse perfect squares into rationals

    Args:
        variant (str): one of 'rational', 'quadratic', 'float'
        rational (Fraction): rational value, or the rational part of a quadratic irrational
        irrational (Fraction): coefficient b of sqrt(d) for quadratic irrationals
        radicand (int): square-free d for quadratic irrationals
        approximation (float): value of the float variant
    """
    variant: str
    rational: Fraction = Fraction(0)
    irrational: Fraction = Fraction(0)
    radicand: int = 1
    approximation: float = 0.0

    def __post_init__(self):
        """
        Raises:
            ValueError: if the variant is unknown, a quadratic has b = 0 or a non square-free radicand, or a float is not finite
        """
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown real number variant '{self.variant}'")
        if self.variant == QUADRATIC:
            if self.irrational == 0:
                raise ValueError("quadratic irrational must have a non-zero coefficient of sqrt(d)")
            if self.radicand < 2 or core(self.radicand) != self.radicand:
                raise ValueError(f"radicand {self.radicand} is not a square-free integer >= 2")
        if self.variant == FLOAT and not math.isfinite(self.approximation):
            raise ValueError(f"float real number must be finite, got {self.approximation}")

    @classmethod
    def from_rational(cls, numerator: int, denominator: int = 1) -> "RealNumberRep":
        if denominator == 0:
            raise ValueError("zero denominator")
        return cls(RATIONAL, rational=Fraction(numerator, denominator))

    @classmethod
    def quadratic(cls, a: Union[int, Fraction], b: Union[int, Fraction], d: int) -> "RealNumberRep":
        """
        Builds a + b*sqrt(d), moving square factors of d into b; a perfect square d gives a rational

        Examples:
            >>> RealNumberRep.quadratic(0, 1, 8)
            RealNumberRep(variant='quadratic', rational=Fraction(0, 1), irrational=Fraction(2, 1), radicand=2, approximation=0.0)
        """
        if d < 0:
            raise ValueError(f"negative radicand {d}")
        a, b = Fraction(a), Fraction(b)
        if d == 0 or b == 0:
            return cls(RATIONAL, rational=a)
        square_free = int(core(d))
        b *= math.isqrt(d // square_free)
        if square_free == 1:
            return cls(RATIONAL, rational=a + b)
        return cls(QUADRATIC, rational=a, irrational=b, radicand=square_free)

    @classmethod
    def from_float(cls, value: float) -> "RealNumberRep":
        return cls(FLOAT, approximation=float(value))

    @property
    def is_exact(self) -> bool:
        return self.variant != FLOAT

    @property
    def is_rational(self) -> bool:
        return self.variant == RATIONAL

    @property
    def value(self) -> float:
        if self.variant == RATIONAL:
            return float(self.rational)
        if self.variant == QUADRATIC:
            return float(self.rational) + float(self.irrational) * math.sqrt(self.radicand)
        return self.approximation

    def __neg__(self) -> "RealNumberRep":
        if self.variant == FLOAT:
            return RealNumberRep(FLOAT, approximation=-self.approximation)
        return RealNumberRep(self.variant, rational=-self.rational, irrational=-self.irrational, radicand=self.radicand)

    def __add__(self, other: int) -> "RealNumberRep":
        """ Shift by an integer (the only arithmetic the distance computations are invariant under) """
        if not isinstance(other, int):
            return NotImplemented
        if self.variant == FLOAT:
            return RealNumberRep(FLOAT, approximation=self.approximation + other)
        return RealNumberRep(self.variant, rational=self.rational + other, irrational=self.irrational, radicand=self.radicand)

    __radd__ = __add__

    def __str__(self) -> str:
        if self.variant == RATIONAL:
            return str(self.rational)
        if self.variant == QUADRATIC:
            head = f"{self.rational}" if self.rational != 0 else ""
            sign = "-" if self.irrational < 0 else ("+" if head else "")
            coefficient = abs(self.irrational)
            body = f"sqrt({self.radicand})" if coefficient == 1 else f"{coefficient}*sqrt({self.radicand})"
            return f"{head}{sign}{body}"
        return repr(self.approximation)

    def nearest_integer_distances(self, multipliers: np.ndarray) -> np.ndarray:
        """
        Vectorized distance from n*x to the nearest integer for every n in `multipliers`

        Rationals are handled in exact integer arithmetic (so an exact 0 is detectable), the rational part of a quadratic irrational too;
            only the b*sqrt(d) part of a quadratic and the float variant go through floating point

        Args:
            multipliers (np.ndarray): positive integers n

        Returns:
            distances (np.ndarray): float array of ||n*x|| values in [0, 1/2]
        """
        multipliers = np.asarray(multipliers, dtype=np.int64)
        if self.variant == FLOAT:
            products = multipliers * self.approximation
            return np.abs(products - np.rint(products))
        rational_part = self._fractional_parts(multipliers, self.rational)
        if self.variant == RATIONAL:
            return np.minimum(rational_part, 1.0 - rational_part)
        products = rational_part + self._scaled(multipliers, self.irrational) * math.sqrt(self.radicand)
        return np.abs(products - np.rint(products))

    @staticmethod
    def _fractional_parts(multipliers: np.ndarray, value: Fraction) -> np.ndarray:
        """ frac(n * value) in exact integer arithmetic, returned as floats """
        numerator, denominator = value.numerator % value.denominator, value.denominator
        if multipliers.size == 0:
            return np.zeros(0)
        if int(multipliers.max()) * max(numerator, 1) < _INT64_SAFE:
            remainders = (multipliers * numerator) % denominator
            return remainders / denominator
        return np.array([((int(n) * numerator) % denominator) / denominator for n in multipliers])

    @staticmethod
    def _scaled(multipliers: np.ndarray, value: Fraction) -> np.ndarray:
        """ n * value as floats, with the numerator product taken exactly """
        if multipliers.size == 0:
            return np.zeros(0)
        if int(multipliers.max()) * max(abs(value.numerator), 1) < _INT64_SAFE:
            return (multipliers * value.numerator) / value.denominator
        return np.array([float(int(n) * value) for n in multipliers])

    def is_integer_multiple(self, n: int) -> bool:
        """ exact check that n*x is an integer; only rationals can answer True """
        if self.variant == RATIONAL:
            return (n * self.rational).denominator == 1
        if self.variant == FLOAT:
            product = n * self.approximation
            return product == round(product)
        return False

    def continued_fraction(self) -> Tuple[List[int], List[int]]:
        """
        Continued-fraction expansion of an exact value as (leading terms, repeating period)

        Rationals have an empty period, quadratic irrationals a non-empty one (sympy's periodic expansion of (P + S*sqrt(d))/Q)

        Raises:
            ValueError: for the float variant
        """
        if self.variant == FLOAT:
            raise ValueError("continued fractions are only computed for exact real numbers")
        if self.variant == RATIONAL:
            terms = continued_fraction_periodic(self.rational.numerator, self.rational.denominator)
        else:
            common = math.lcm(self.rational.denominator, self.irrational.denominator)
            terms = continued_fraction_periodic(int(self.rational * common), common, self.radicand,
                                                int(self.irrational * common))
        if terms and isinstance(terms[-1], list):
            return [int(t) for t in terms[:-1]], [int(t) for t in terms[-1]]
        return [int(t) for t in terms], []

    def partial_quotients(self, count: int) -> List[int]:
        """ first `count` partial quotients a_0, a_1, ... (fewer for rationals) """
        head, period = self.continued_fraction()
        source: Iterator[int] = chain(head, cycle(period)) if period else iter(head)
        return list(islice(source, count))

    def max_partial_quotient(self) -> int:
        """
        Bound K on the partial quotients a_1, a_2, ... of an exact quadratic irrational (eventually periodic, so the bound is exact)

        Raises:
            ValueError: for rationals and floats
        """
        if self.variant != QUADRATIC:
            raise ValueError("partial quotient bound is only defined for quadratic irrationals")
        head, period = self.continued_fraction()
        tail = head[1:] + period if head else period
        return max(tail)


def parse_real(text: str) -> RealNumberRep:
    """
    Parses the command line syntax for real numbers

    Examples:
        >>> parse_real("1/2").rational
        Fraction(1, 2)

        >>> str(parse_real("1+2*sqrt(3)"))
        '1+2*sqrt(3)'

        >>> parse_real("0.25").variant
        'float'

    Raises:
        ValueError: if the text matches none of the supported forms
    """
    text = text.strip().replace(" ", "")
    match = RATIONAL_REGEX.match(text)
    if match is not None:
        return RealNumberRep.from_rational(int(match.group("num")), int(match.group("den") or 1))
    match = QUADRATIC_REGEX.match(text)
    if match is not None:
        a = Fraction(match.group("a")) if match.group("a") else Fraction(0)
        b = Fraction(match.group("b")) if match.group("b") else Fraction(1)
        if match.group("sign") == "-":
            b = -b
        return RealNumberRep.quadratic(a, b, int(match.group("d")))
    try:
        return RealNumberRep.from_float(float(text))
    except ValueError:
        raise ValueError(f"could not parse real number '{text}'")

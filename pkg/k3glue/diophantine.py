import csv
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from k3glue.reals import QUADRATIC, RealNumberRep

logger = logging.getLogger(__name__)

REFUTED = "refuted"
CERTIFIED = "certified"
ESTIMATED = "estimated"

DEFAULT_N_MAX = 100_000
MIN_SCAN = 10
# relative slack allowed when re-checking fitted envelopes against the profile they were fitted on
ENVELOPE_RTOL = 1e-12
# distances at or below RESOLUTION_FACTOR * eps * n * max(1, |p|, |q|) are not told apart from 0
RESOLUTION_FACTOR = 64


@dataclass(frozen=True)
class DiophantineVerdict(object):
    """
    Outcome of a Diophantine-condition check for a pair (p, q)

    Only the fields of the respective status are meaningful:
        * refuted: `witness_n` with min_distance(p, q, witness_n) == 0 exactly
        * certified: `theta`, `A` and a human readable `basis`
        * estimated: `theta` (fitted exponent), `A` (lower-envelope constant), `n_max`, `min_slack` (min of d(n) / (A n^-theta),
            1 up to rounding), the plain least-squares constant `A_least_squares` with its slack `least_squares_slack`
            (min of d(n) / (A_least_squares n^-theta), below 1 when the fitted line overshoots some n) and an optional `basis` note
    """
    status: str
    witness_n: Optional[int] = None
    theta: Optional[float] = None
    A: Optional[float] = None
    n_max: Optional[int] = None
    min_slack: Optional[float] = None
    A_least_squares: Optional[float] = None
    least_squares_slack: Optional[float] = None
    basis: str = ""

    def __post_init__(self):
        if self.status == REFUTED and (self.witness_n is None or self.witness_n < 1):
            raise ValueError("refuted verdict needs a positive witness")
        if self.status in (CERTIFIED, ESTIMATED) and not (self.theta is not None and self.theta >= 0 and self.A is not None and self.A > 0):
            raise ValueError(f"{self.status} verdict needs theta >= 0 and A > 0, got theta={self.theta}, A={self.A}")

    @property
    def satisfies_condition(self) -> bool:
        return self.status != REFUTED


@dataclass(frozen=True)
class ExponentialReport(object):
    """
    Fitted exponential bound min_distance(n) >= c * exp(-a n) over 1 <= n <= sigma_max

    Args:
        passed (bool): no distance over the scan is 0 or within the rounding floor RESOLUTION_FACTOR * eps * n * max(1, |p|, |q|)
        c (float), a (float): fitted constants
        sigma_max (int): scan length
        witness_sigma (int): first n whose distance is 0 or below that floor, if any
        implied_by_polynomial (bool): the polynomial verdict's (A, theta) also satisfies A * exp(-theta n) over the scan
    """
    passed: bool
    c: float
    a: float
    sigma_max: int
    witness_sigma: Optional[int] = None
    implied_by_polynomial: Optional[bool] = None
    polynomial: Optional[DiophantineVerdict] = field(default=None, compare=False)


def min_distance(p: RealNumberRep, q: RealNumberRep, n: int) -> float:
    """
    Distance from n(p + qi) to the nearest Gaussian integer, sqrt(||np||^2 + ||nq||^2)

    Examples:
        >>> min_distance(RealNumberRep.from_rational(1, 2), RealNumberRep.from_rational(1, 3), 6)
        0.0
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return float(distance_profile(p, q, n, start=n)[0])


def distance_profile(p: RealNumberRep, q: RealNumberRep, n_max: int, start: int = 1) -> np.ndarray:
    """ min_distance(p, q, n) for n = start..n_max as a float array (fixed order, exact zeros for rational hits) """
    multipliers = np.arange(start, n_max + 1, dtype=np.int64)
    return np.hypot(p.nearest_integer_distances(multipliers), q.nearest_integer_distances(multipliers))


def record_minima(distances: np.ndarray) -> np.ndarray:
    """ indices where the profile reaches a new strict minimum """
    previous_best = np.concatenate(([np.inf], np.minimum.accumulate(distances)[:-1]))
    return np.flatnonzero(distances < previous_best)


def _exact_witness(p: RealNumberRep, q: RealNumberRep) -> Optional[int]:
    if p.is_rational and q.is_rational:
        return math.lcm(p.rational.denominator, q.rational.denominator)
    return None


def _basis_note(p: RealNumberRep, q: RealNumberRep, n_max: int) -> str:
    """ badly-approximable note for exact quadratic coordinates, based on the convergents with denominators up to n_max """
    notes = []
    for name, x in (("p", p), ("q", q)):
        if x.variant != QUADRATIC:
            continue
        quotients, denominators = [], (1, 0)
        for a_k in x.partial_quotients(200)[1:]:
            denominators = (a_k * denominators[0] + denominators[1], denominators[0])
            quotients.append(a_k)
            if denominators[0] > n_max:
                break
        bound = max(quotients) if quotients else 0
        notes.append(f"badly approximable: partial quotients of {name}={x} bounded by {bound} up to n={n_max}")
    return "; ".join(notes)


def check_pair(p: RealNumberRep, q: RealNumberRep, n_max: int = DEFAULT_N_MAX, certify: bool = False) -> DiophantineVerdict:
    """
    Checks the Diophantine condition ||n(p + qi) - (μ + νi)|| >= A n^(-theta) for the pair (p, q)

    Rational pairs are refuted exactly (witness n = lcm of the denominators). Otherwise the profile over n <= n_max is scanned,
        log min_distance is fitted against -theta log n + log A by least squares over the record minima, and the verdict reports
        theta_fit = max(-slope, 0) with the lower-envelope constant A_fit = min_n d(n) n^theta_fit, so that d(n) >= A_fit n^-theta_fit over the scan.
    With `certify`, an exact quadratic-irrational coordinate with partial quotients bounded by K yields the certified bound theta = 1, A = 1/(K + 2).

    Args:
        p, q (RealNumberRep): the pair
        n_max (int): scan length, at least 10
        certify (bool): allow the certified tier

    Returns:
        DiophantineVerdict

    Raises:
        ValueError: if n_max < 10
    """
    if n_max < MIN_SCAN:
        raise ValueError(f"n_max must be at least {MIN_SCAN}, got {n_max}")
    witness = _exact_witness(p, q)
    if witness is not None:
        return DiophantineVerdict(REFUTED, witness_n=witness)
    if certify:
        for x in (p, q):
            if x.variant == QUADRATIC:
                bound = x.max_partial_quotient()
                return DiophantineVerdict(CERTIFIED, theta=1.0, A=1.0 / (bound + 2),
                                          basis=f"coordinate {x} is badly approximable with partial quotients bounded by {bound}")

    distances = distance_profile(p, q, n_max)
    zeros = np.flatnonzero(distances == 0)
    if zeros.size > 0:
        return DiophantineVerdict(REFUTED, witness_n=int(zeros[0]) + 1)

    records = record_minima(distances)
    log_n = np.log(records + 1.0)
    log_d = np.log(distances[records])
    if records.size >= 2:
        slope, intercept = np.polyfit(log_n, log_d, 1)
    else:
        slope, intercept = 0.0, float(log_d[0])
    theta = max(-float(slope), 0.0)
    all_log_n = np.log(np.arange(1, n_max + 1, dtype=float))
    log_envelope = float(np.min(np.log(distances) + theta * all_log_n))
    a_fit = math.exp(log_envelope)
    min_slack = float(np.min(distances * np.exp(theta * all_log_n - log_envelope)))
    least_squares_slack = float(np.min(distances * np.exp(theta * all_log_n - float(intercept))))
    logger.debug(f"scanned n <= {n_max}: {records.size} record minima, theta_fit={theta:.4f}")
    return DiophantineVerdict(ESTIMATED, theta=theta, A=a_fit, n_max=n_max, min_slack=min_slack,
                              A_least_squares=math.exp(float(intercept)), least_squares_slack=least_squares_slack,
                              basis=_basis_note(p, q, n_max))


def check_exponential(p: RealNumberRep, q: RealNumberRep, sigma_max: int = 10_000) -> ExponentialReport:
    """
    Exponential reformulation: min over 0 < |σ| <= sigma_max and δ of ||σ(p, q) + δ|| compared with c * exp(-a |σ|)

    The inner minimum equals min_distance(p, q, |σ|), so the scan runs over n = 1..sigma_max. a is fitted from the record minima
        of log d(n) against n (clamped at 0), c is the lower envelope min_n d(n) exp(a n). The check fails when a distance is
        not resolved above the rounding floor of its computation, e.g. for a float pair sitting on a rational one. The polynomial verdict of check_pair
        on the same range is re-checked in exponential form, A exp(-theta n) <= d(n), which holds whenever A n^-theta <= d(n).

    Raises:
        ValueError: if sigma_max < 10
    """
    if sigma_max < MIN_SCAN:
        raise ValueError(f"sigma_max must be at least {MIN_SCAN}, got {sigma_max}")
    distances = distance_profile(p, q, sigma_max)
    zeros = np.flatnonzero(distances == 0)
    if zeros.size > 0:
        return ExponentialReport(False, 0.0, 0.0, sigma_max, witness_sigma=int(zeros[0]) + 1)

    n = np.arange(1, sigma_max + 1, dtype=float)
    records = record_minima(distances)
    slope = np.polyfit(n[records], np.log(distances[records]), 1)[0] if records.size >= 2 else 0.0
    a = max(-float(slope), 0.0)
    log_c = float(np.min(np.log(distances) + a * n))
    floor = RESOLUTION_FACTOR * np.finfo(float).eps * n * max(1.0, abs(p.value), abs(q.value))
    unresolved = np.flatnonzero(distances <= floor)
    witness = int(unresolved[0]) + 1 if unresolved.size > 0 else None
    if witness is not None:
        logger.debug(f"distance at n={witness} is {distances[witness - 1]:.3g}, below the rounding floor {floor[witness - 1]:.3g}")

    polynomial = check_pair(p, q, sigma_max)
    implied = None
    if polynomial.status in (CERTIFIED, ESTIMATED):
        exponential_bound = polynomial.A * np.exp(-polynomial.theta * n)
        implied = bool(np.all(distances >= exponential_bound * (1 - ENVELOPE_RTOL)))
    return ExponentialReport(witness is None, math.exp(log_c), a, sigma_max, witness_sigma=witness, implied_by_polynomial=implied,
                             polynomial=polynomial)


def write_profile_csv(p: RealNumberRep, q: RealNumberRep, n_max: int, destination: IO[str]):
    """ writes the (n, min_distance) profile with a header row """
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(["n", "min_distance"])
    for index, distance in enumerate(distance_profile(p, q, n_max), start=1):
        writer.writerow([index, repr(float(distance))])


def verdict_as_dict(verdict: DiophantineVerdict) -> dict:
    result = {"status": verdict.status}
    if verdict.status == REFUTED:
        result["witness_n"] = verdict.witness_n
    else:
        result.update(theta=verdict.theta, A=verdict.A, basis=verdict.basis)
    if verdict.status == ESTIMATED:
        result.update(n_max=verdict.n_max, min_slack=verdict.min_slack, A_least_squares=verdict.A_least_squares,
                      least_squares_slack=verdict.least_squares_slack)
    return result


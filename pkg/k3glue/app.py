import argparse
import cmath
import csv
import json
import logging
import math
import os
import sys
from argparse import Namespace
from dataclasses import InitVar, asdict, dataclass, field, fields, replace
from importlib import resources
from logging import Logger
from typing import Callable, Dict, Iterable, Iterator, List, Optional, TypeVar, Union

import numpy as np
from jsonschema import Draft202012Validator

from k3glue import version
from k3glue.diophantine import check_exponential, check_pair, verdict_as_dict, write_profile_csv
from k3glue.elliptic import (ComplexLattice, TorusPoint, cubic_residual, embed, j_invariant, weierstrass_invariants)
from k3glue.family import (FiberDescriptor, build_fiber, default_p_hat, fibers_distinct, sample_parameters,
                           topology_report, verify_fiber, FamilyParams, DEFAULT_RADIUS)
from k3glue.metric import (CutoffSpec, NeckMetricSpec, completeness_slope, cutoff_profile, metric_determinant,
                           neck_metric_matrix, psi_profile, radial_length, ricci_check)
from k3glue.neck import (SYMBOLIC, GlueParams, NeckChartSpec, NeckPoint, canonicalize, class_distance, deck,
                         pullback_profile, transition_fs, two_form_pullback_check)
from k3glue.picard import DivisorClass, ampleness_grid, gram_matrix, signature
from k3glue.reals import RealNumberRep, parse_real
from k3glue.toroidal import (TOROIDAL, ThetaBundleSpec, ToroidalLattice, cocycle_residual, first_chern_number,
                             h1_from_intersection, is_toroidal, riemann_form_check, standard_riemann_form, stein_summary,
                             type_and_kind, witness_products)
from k3glue.verification import ACCEPTANCE_CHECKS, CheckResult, SuiteSettings, Tolerances

CONFIG_ENV = "K3GLUE_CONFIG"
JSON = "json"
CSV = "csv"
FORMATS = (JSON, CSV)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class RunConfig(object):
    """
    Run-wide settings, loaded from a JSON file (`--config` or the K3GLUE_CONFIG environment variable) and overridden by explicit flags

    Args:
        tolerances (Tolerances): named tolerances of the checks
        truncation_radius (float): lattice-sum cutoff
        n_max (int): Diophantine scan length
        seed (int): seed of every sampled check
        samples (int): sample count of the sampled checks
        output (Optional[str]): 'json' or 'csv'; None picks the subcommand's default
    """
    tolerances: Tolerances = field(default_factory=Tolerances)
    truncation_radius: float = 100.0
    n_max: int = 100_000
    seed: int = 0
    samples: int = 100
    output: Optional[str] = None

    def __post_init__(self):
        if self.output is not None and self.output not in FORMATS:
            raise ValueError(f"unknown output format '{self.output}', expected one of {FORMATS}")
        if self.n_max < 10:
            raise ValueError(f"n_max must be at least 10, got {self.n_max}")
        if self.samples < 1:
            raise ValueError(f"samples must be positive, got {self.samples}")
        if not self.truncation_radius >= 2:
            raise ValueError(f"truncation radius must be >= 2, got {self.truncation_radius}")

    @classmethod
    def from_mapping(cls, values: Dict) -> "RunConfig":
        """
        Raises:
            ValueError: on unknown keys or invalid values
        """
        known = {entry.name for entry in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"unknown configuration keys {unknown}, expected a subset of {sorted(known)}")
        values = dict(values)
        if "tolerances" in values:
            values["tolerances"] = Tolerances.from_mapping(values["tolerances"])
        return cls(**values)

    @property
    def settings(self) -> SuiteSettings:
        return SuiteSettings(self.tolerances, self.seed, self.truncation_radius, self.n_max, self.samples)


def load_config(path: Optional[str], environ: Optional[Dict[str, str]] = None) -> RunConfig:
    """ reads the configuration file named by `path`, or by K3GLUE_CONFIG when no path is given; defaults otherwise """
    environ = os.environ if environ is None else environ
    path = path or environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    with open(path, "rt") as source:
        return RunConfig.from_mapping(json.load(source))


def parse_complex(text: str) -> complex:
    """
    Complex numbers on the command line: python syntax with `i` or `j` as the imaginary unit, plus the alias `rho` for exp(2πi/3)

    Examples:
        >>> parse_complex("0.3+1.2i")
        (0.3+1.2j)
    """
    text = text.strip().lower().replace(" ", "")
    if text == "rho":
        return cmath.exp(2j * math.pi / 3)
    if text in ("i", "+i"):
        return 1j
    if text == "-i":
        return -1j
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise ValueError(f"could not parse complex number '{text}'")


def as_pair(value: complex) -> List[float]:
    """ JSON form of a complex number """
    value = complex(value)
    return [value.real, value.imag]


def load_schema(command: str) -> dict:
    return json.loads(resources.files("k3glue").joinpath("schemas", f"{command}.json").read_text())


def validate_payload(command: str, payload: Union[dict, list]):
    """
    Raises:
        ValueError: if the payload violates the published schema of the subcommand
    """
    errors = sorted(Draft202012Validator(load_schema(command)).iter_errors(payload), key=lambda e: list(e.path))
    if errors:
        raise ValueError(f"{command} output violates its schema: {errors[0].message} at {list(errors[0].path)}")


@dataclass
class CommandOutput(object):
    payload: Union[dict, list]
    rows: Optional[List[list]] = None
    passed: bool = True
    csv_writer: Optional[Callable] = field(default=None, repr=False)


@dataclass
class K3glueApp(object):
    """ Application like class that runs one subcommand for a resolved configuration

        Provides three levels (I, R, and F) for handling errors in batch commands (family sampling and the acceptance suite),
            with the same meaning as everywhere else: ignore, report in log, and fail

    Args:
        config (RunConfig): resolved run configuration
        fail_mode (choice of ['I', 'R', 'F']): what to do when an item of a batch raises
    """
    config: RunConfig = field(default_factory=RunConfig)
    fail_mode: str = 'R'
    _logger: Logger = None
    log_level: InitVar[int] = logging.INFO

    @staticmethod
    def _setup_logger(logger: logging.Logger, level: int):
        """ A helper staticmethod designed to encapsulate logger setup
        """
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
        handler = logging.StreamHandler()
        formatter = logging.Formatter("%(asctime)s %(name)s [%(levelname)-8.8s] -- %(message)s")
        handler.setFormatter(formatter)
        handler.setLevel(level)
        logger.addHandler(handler)
        logger.setLevel(level)

    def __post_init__(self, log_level):
        if self.fail_mode not in ("I", "R", "F"):
            raise ValueError(f"unknown error mode '{self.fail_mode}'")
        self._logger = logging.getLogger('K3GLUE')
        self._setup_logger(self._logger, log_level)
        self._logger.info(f"Starting K3glueApp {version} (seed={self.config.seed})")

    @property
    def logger(self) -> Logger:
        return self._logger

    def guarded(self, items: Iterable[T], action: Callable[[T], R], on_error: Callable[[T, ValueError], Optional[R]] = None) -> Iterator[R]:
        """ Applies `action` to every item; a ValueError is skipped ('I'), logged and optionally turned into a result by `on_error` ('R'),
            or ends the run with exit code 1 ('F')
        """
        for item in items:
            try:
                yield action(item)
            except ValueError as e:
                if self.fail_mode == "I":
                    continue
                self._logger.error(str(e))
                if self.fail_mode == "F":
                    self._logger.critical("Exiting because of an error in a batch item and fail mode set to 'F'. "
                                          "To allow for errors in the future to be skipped/reported use --error-mode 'I' or 'R'")
                    sys.exit(1)
                if on_error is not None:
                    yield on_error(item, e)


def _tolerances(app: K3glueApp) -> dict:
    return asdict(app.config.tolerances)


def run_dioph_check(app: K3glueApp, args: Namespace) -> CommandOutput:
    verdict = check_pair(args.p, args.q, app.config.n_max, certify=args.certify)
    payload = verdict_as_dict(verdict)
    payload.update(p=str(args.p), q=str(args.q), tolerances=_tolerances(app))
    if args.exponential is not None:
        report = check_exponential(args.p, args.q, args.exponential)
        payload["exponential"] = {"passed": report.passed, "c": report.c, "a": report.a, "sigma_max": report.sigma_max,
                                  "witness_sigma": report.witness_sigma, "implied_by_polynomial": report.implied_by_polynomial}
    app.logger.info(f"Diophantine verdict for ({args.p}, {args.q}): {verdict.status}")
    return CommandOutput(payload, csv_writer=lambda destination: write_profile_csv(args.p, args.q, app.config.n_max, destination))


def run_embed(app: K3glueApp, args: Namespace) -> CommandOutput:
    cfg = app.config.settings.lattice_config
    lattice = ComplexLattice(args.tau)
    g2, g3 = weierstrass_invariants(lattice, cfg)
    points, rows = [], [["z_re", "z_im", "z1_re", "z1_im", "z2_re", "z2_im", "z3_re", "z3_im", "cubic_residual"]]
    for z in args.z:
        image = embed(TorusPoint.of(z, lattice), lattice, cfg).normalized()
        residual = cubic_residual(image, lattice, cfg)
        points.append({"z": as_pair(z), "point": [as_pair(c) for c in image.coords], "cubic_residual": residual})
        rows.append(as_pair(z) + [part for c in image.coords for part in as_pair(c)] + [residual])
    passed = all(p["cubic_residual"] <= app.config.tolerances.residual for p in points)
    payload = {"tau": as_pair(args.tau), "g2": as_pair(g2), "g3": as_pair(g3), "j": as_pair(j_invariant(lattice, cfg)),
               "points": points, "tolerances": _tolerances(app)}
    return CommandOutput(payload, rows, passed)


def run_picard_table(app: K3glueApp, args: Namespace) -> CommandOutput:
    grid = ampleness_grid(args.dmax)
    positive, negative = signature(gram_matrix())
    payload = {"rows": [{"d": d, "k": k, "verdict": verdict, "b0": b0} for d, k, verdict, b0 in grid],
               "signature": [positive, negative], "tolerances": _tolerances(app)}
    return CommandOutput(payload, [["d", "k", "verdict", "3d-9k"]] + [list(row) for row in grid])


def run_toroidal_classify(app: K3glueApp, args: Namespace) -> CommandOutput:
    lattice = ToroidalLattice(args.tau, args.p, args.q)
    verdict = is_toroidal(lattice, args.search_bound)
    form = standard_riemann_form(args.tau)
    group_type, kind = type_and_kind(lattice, form)
    payload = {"status": verdict.status, "reason": verdict.reason,
               "witness": None if verdict.witness is None else [as_pair(v) for v in verdict.witness],
               "witness_products": None if verdict.witness is None else [as_pair(v) for v in witness_products(lattice, verdict.witness)],
               "riemann_form": riemann_form_check(form, lattice).verdict, "first_chern_number": first_chern_number(form, lattice),
               "type": group_type, "kind": kind,
               "stein_summary": stein_summary(group_type, kind) if verdict.status == TOROIDAL else None,
               "tolerances": _tolerances(app)}
    return CommandOutput(payload)


def run_theta_cocycle(app: K3glueApp, args: Namespace) -> CommandOutput:
    lattice = ToroidalLattice(args.tau, args.p, args.q)
    spec = ThetaBundleSpec(h1_from_intersection(args.b0, args.tau), lattice)
    rng = np.random.default_rng(app.config.seed)
    samples = args.samples or app.config.samples
    worst = 0.0
    for _ in range(samples):
        lam, mu = rng.integers(-2, 3, (2, 3))
        x = rng.uniform(0, 1, 2) + 1j * rng.uniform(0, 1, 2)
        worst = max(worst, cocycle_residual(spec, lam, mu, x))
    tolerance = app.config.tolerances.cocycle
    payload = {"max_residual": worst, "samples": samples, "tolerance": tolerance, "tolerances": _tolerances(app)}
    return CommandOutput(payload, passed=worst <= tolerance)


def run_glue_check(app: K3glueApp, args: Namespace) -> CommandOutput:
    chart = NeckChartSpec(args.tau, args.p.value, args.q.value, args.r)
    glue = GlueParams(args.s, args.xi)
    samples = args.samples or app.config.samples
    points, ratios = pullback_profile(glue, chart, samples, app.config.seed)
    pullback_error = float(np.max(np.abs(ratios + 1)))
    rng = np.random.default_rng(app.config.seed + 1)
    equivariance, round_trip = 0.0, 0.0
    for z, w in points:
        pt = NeckPoint(z, w, chart.side)
        m, n = (int(v) for v in rng.integers(-3, 4, 2))
        image = transition_fs(pt, glue, chart)
        equivariance = max(equivariance, class_distance(image, transition_fs(deck(pt, chart, m, n), glue, chart), chart.opposite()))
        round_trip = max(round_trip, class_distance(transition_fs(image, glue, chart.opposite()), canonicalize(pt, chart), chart))
    first_point = NeckPoint(*points[0], chart.side)
    symbolic_error = abs(two_form_pullback_check(first_point, glue, chart, method=SYMBOLIC) + 1)
    tolerances = app.config.tolerances
    passed = max(equivariance, round_trip, symbolic_error) <= tolerances.glue and pullback_error <= tolerances.pullback
    payload = {"samples": samples, "deck_equivariance": equivariance, "round_trip": round_trip,
               "pullback_ratio_error": pullback_error, "pullback_symbolic_error": symbolic_error,
               "tolerances": _tolerances(app)}
    return CommandOutput(payload, passed=passed)


def run_metric_report(app: K3glueApp, args: Namespace) -> CommandOutput:
    spec = NeckMetricSpec(args.b, args.b0, args.tau, args.s, args.eps0, args.r)
    pt = NeckPoint(0, args.w)
    residual = ricci_check(pt, spec, args.h)
    lengths = [{"t0": 10.0 ** -k, "t1": 0.1, "length": radial_length(10.0 ** -k, 0.1, spec)} for k in range(2, 9)]
    payload = {"matrix": neck_metric_matrix(pt, spec).tolist(), "det": metric_determinant(pt, spec), "ricci_residual": residual,
               "radial_lengths": lengths, "completeness_slope": completeness_slope(spec), "tolerances": _tolerances(app)}
    cutoff = CutoffSpec(r=args.r)
    rows = [["profile", "x", "value"]]
    rows += [["f_tilde", x, v] for x, v in zip(*cutoff_profile(cutoff))]
    rows += [["psi_s", x, v] for x, v in zip(*psi_profile(cutoff, args.s))]
    return CommandOutput(payload, rows, residual <= app.config.tolerances.ricci)


def fiber_as_dict(fiber: FiberDescriptor) -> dict:
    topology = topology_report(fiber)
    return {"tau": as_pair(fiber.tau), "points": [as_pair(pt.z) for pt in fiber.points],
            "ample": {"d": fiber.ample.d, "k": list(fiber.ample.k)}, "b0": fiber.b0,
            "neck": {"p": fiber.neck.p, "q": fiber.neck.q, "r": fiber.neck.r, "side": fiber.neck.side},
            "topology": {"euler": topology.euler, "b2": topology.b2, "signature": topology.signature}}


def _family_base(args: Namespace, tau: complex) -> FamilyParams:
    return FamilyParams(tau, default_p_hat(), args.p, args.q)


def run_family_sample(app: K3glueApp, args: Namespace) -> CommandOutput:
    ample = DivisorClass.uniform(args.d, args.k)
    draws = sample_parameters(_family_base(args, args.tau), args.count, app.config.seed, args.radius)
    tolerances = app.config.tolerances

    def describe(params: FamilyParams) -> dict:
        fiber = build_fiber(params, ample)
        check = verify_fiber(fiber, app.config.settings.lattice_config, tolerances.constraint, tolerances.residual)
        entry = fiber_as_dict(fiber)
        entry["check"] = {"constraint_residual": check.constraint_residual, "max_cubic_residual": check.max_cubic_residual,
                          "ample_certified": check.ample_certified, "passed": check.passed,
                          "tolerances": {"constraint": tolerances.constraint, "residual": tolerances.residual}}
        return entry

    fibers = list(app.guarded(draws, describe))
    rows = [["index", "tau_re", "tau_im", "b0", "constraint_residual", "max_cubic_residual", "passed"]]
    rows += [[i] + f["tau"] + [f["b0"], f["check"]["constraint_residual"], f["check"]["max_cubic_residual"], f["check"]["passed"]]
             for i, f in enumerate(fibers)]
    app.logger.info(f"Sampled {len(fibers)} of {args.count} fibers")
    return CommandOutput(fibers, rows, all(f["check"]["passed"] for f in fibers) and len(fibers) == args.count)


def run_family_distinct(app: K3glueApp, args: Namespace) -> CommandOutput:
    ample = DivisorClass.uniform(args.d, args.k)
    first = build_fiber(_family_base(args, args.tau1), ample)
    second = build_fiber(_family_base(args, args.tau2), ample)
    comparison = fibers_distinct(first, second, app.config.tolerances.j, app.config.settings.lattice_config)
    payload = {"verdict": comparison.verdict, "j1": as_pair(comparison.j1), "j2": as_pair(comparison.j2),
               "tau1": as_pair(args.tau1), "tau2": as_pair(args.tau2), "tolerance": app.config.tolerances.j,
               "tolerances": _tolerances(app)}
    return CommandOutput(payload)


def run_verify_all(app: K3glueApp, args: Namespace) -> CommandOutput:
    settings = app.config.settings

    def run(check: Callable[[SuiteSettings], CheckResult]) -> CheckResult:
        result = check(settings)
        app.logger.info(f"{result.name}: {'passed' if result.passed else 'FAILED'} (value={result.value:.3g}, tolerance={result.tolerance:.3g})")
        return result

    def errored(check: Callable, error: ValueError) -> CheckResult:
        return CheckResult(check.__name__, False, math.nan, math.nan, str(error))

    results = list(app.guarded(ACCEPTANCE_CHECKS, run, errored))
    passed = all(result.passed for result in results)
    checks = [{"name": r.name, "passed": r.passed, "value": None if math.isnan(r.value) else r.value,
               "tolerance": None if math.isnan(r.tolerance) else r.tolerance, "detail": r.detail} for r in results]
    payload = {"checks": checks, "passed": passed, "seed": settings.seed, "tolerances": _tolerances(app)}
    rows = [["name", "passed", "value", "tolerance"]] + [[c["name"], c["passed"], c["value"], c["tolerance"]] for c in checks]
    app.logger.info(f"{sum(r.passed for r in results)} of {len(ACCEPTANCE_CHECKS)} checks passed")
    return CommandOutput(payload, rows, passed)


COMMANDS: Dict[str, Callable[[K3glueApp, Namespace], CommandOutput]] = {
    "dioph-check": run_dioph_check,
    "embed": run_embed,
    "picard-table": run_picard_table,
    "toroidal-classify": run_toroidal_classify,
    "theta-cocycle": run_theta_cocycle,
    "glue-check": run_glue_check,
    "metric-report": run_metric_report,
    "family-sample": run_family_sample,
    "family-distinct": run_family_distinct,
    "verify-all": run_verify_all,
}
CSV_DEFAULT = ("picard-table",)


def create_cli_parser():
    """
    Command line parser with one subcommand per operation group
    Returns:
        parser (argparse.ArgumentParser)
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--error-mode", choices=['I', 'R', 'F'], default='R',
                        help="Error mode for batch subcommands, where with 'I' errors are ignore/skipped, "
                             "with 'R' error are reported in the log, and with 'F' app exits on first error; Default = R")
    common.add_argument("--log-level", choices=[0, 10, 20, 30, 40, 50], type=int, default=20)
    common.add_argument("--config", default=None, help=f"JSON configuration file; Default = ${CONFIG_ENV} if set")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--truncation-radius", type=float, default=None)
    common.add_argument("--n-max", type=int, default=None)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("-o", "--output", type=argparse.FileType("wt"), default=sys.stdout,
                        help="File to write the results to. Default = stdout")

    result = argparse.ArgumentParser(prog="K3GLUE",
                                     description="Numerical and exact checks for K3 surfaces glued from two blown-up planes")
    subparsers = result.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return subparsers.add_parser(name, parents=[common], help=help_text)

    def add_pair(parser: argparse.ArgumentParser):
        parser.add_argument("--p", type=parse_real, default=RealNumberRep.quadratic(0, 1, 2),
                            help="first monodromy exponent: a/b, a+b*sqrt(d) or a decimal; Default = sqrt(2)")
        parser.add_argument("--q", type=parse_real, default=RealNumberRep.quadratic(0, 1, 3), help="Default = sqrt(3)")

    parser = add("dioph-check", "Diophantine condition for a pair (p, q)")
    add_pair(parser)
    parser.add_argument("--certify", action="store_true", help="allow the certified tier for exact quadratic irrationals")
    parser.add_argument("--exponential", type=int, default=None, metavar="SIGMA_MAX", help="also check the exponential form")

    parser = add("embed", "Weierstrass embedding of torus points into CP^2")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    parser.add_argument("--z", type=parse_complex, action="append", required=True)

    parser = add("picard-table", "ampleness criterion over uniform classes dH - kΣE")
    parser.add_argument("--dmax", type=int, default=20)

    parser = add("toroidal-classify", "toroidality, Riemann form and type/kind of C^2/Λ0")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    add_pair(parser)
    parser.add_argument("--search-bound", type=int, default=1000)

    parser = add("theta-cocycle", "cocycle residual of the theta factor of automorphy")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    parser.add_argument("--b0", type=int, default=3)
    add_pair(parser)
    parser.add_argument("--samples", type=int, default=None)

    parser = add("glue-check", "gluing map checks on the annulus V_s")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    add_pair(parser)
    parser.add_argument("--s", type=parse_complex, default=0.01)
    parser.add_argument("--xi", type=parse_complex, default=0j)
    parser.add_argument("--r", type=float, default=2.0)
    parser.add_argument("--samples", type=int, default=None)

    parser = add("metric-report", "model neck metric, Ricci residual and completeness")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    parser.add_argument("--b0", type=int, default=3)
    parser.add_argument("--b", type=float, default=0.5)
    parser.add_argument("--w", type=parse_complex, default=0.1)
    parser.add_argument("--s", type=parse_complex, default=0.01)
    parser.add_argument("--eps0", type=float, default=0.25)
    parser.add_argument("--r", type=float, default=2.0)
    parser.add_argument("--h", type=float, default=1e-4)

    parser = add("family-sample", "seeded fibers of the nine-parameter family")
    parser.add_argument("--tau", type=parse_complex, default=1j)
    add_pair(parser)
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    parser.add_argument("--d", type=int, default=7)
    parser.add_argument("--k", type=int, default=2)

    parser = add("family-distinct", "j-invariant comparison of two fibers")
    parser.add_argument("--tau1", type=parse_complex, default=1j)
    parser.add_argument("--tau2", type=parse_complex, default=2j)
    add_pair(parser)
    parser.add_argument("--d", type=int, default=7)
    parser.add_argument("--k", type=int, default=2)

    add("verify-all", "the full acceptance suite")
    return result


def resolve_config(args: Namespace, environ: Optional[Dict[str, str]] = None) -> RunConfig:
    """ configuration file values with explicit flags on top """
    config = load_config(args.config, environ)
    overrides = {name: getattr(args, name) for name in ("seed", "truncation_radius", "n_max")
                 if getattr(args, name) is not None}
    if args.format is not None:
        overrides["output"] = args.format
    return replace(config, **overrides)


def write_output(command: str, output: CommandOutput, fmt: str, destination):
    if fmt == JSON:
        validate_payload(command, output.payload)
        destination.write(json.dumps(output.payload, sort_keys=True, indent=2) + "\n")
    elif output.csv_writer is not None:
        output.csv_writer(destination)
    elif output.rows is not None:
        csv.writer(destination, lineterminator="\n").writerows(output.rows)
    else:
        raise ValueError(f"subcommand {command} has no CSV output")


def main(args_list: List[str], environ: Optional[Dict[str, str]] = None) -> int:
    """ main entry point for the application run in a command line mode
    Args:
        args_list: sys.argv[1:] elements
        environ: environment used for the K3GLUE_CONFIG lookup (os.environ by default)

    Returns:
        exit code: 0 on success, 1 when a verification fails (argparse exits with 2 on usage errors)
    """
    parser = create_cli_parser()
    args: Namespace = parser.parse_args(args_list)
    try:
        config = resolve_config(args, environ)
    except (ValueError, OSError) as e:
        parser.error(f"invalid configuration: {e}")
    app = K3glueApp(config, args.error_mode, log_level=args.log_level)
    app.logger.info(f"Running subcommand {args.command}")
    try:
        output = COMMANDS[args.command](app, args)
        fmt = config.output or (CSV if args.command in CSV_DEFAULT else JSON)
        write_output(args.command, output, fmt, args.output)
    except ValueError as e:
        parser.error(str(e))
    args.output.flush()
    if not output.passed:
        app.logger.error(f"{args.command}: verification failed")
        return 1
    return 0


def execute_script():
    """
    wrapper around the main entry point for the console script
    """
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    execute_script()

"""Command-line interface for randomized lattice rules.

Exit codes: 0 when all enabled checks pass, 1 when a check fails (uncertified
error, violated bound), 2 for invalid input.
"""

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError as PydanticValidationError

from .services.analysis import (
    attach_bounds,
    attach_empirical,
    extremal_integrand,
    lower_bound,
    naive_bound,
    ran_empirical,
    rms_empirical,
    rms_exact,
    witness_integrand,
)
from .services.bounds import select_parameters, smallest_order, theorem1_bound
from .services.construct import build_generating_vector, certify_residues, constant_vector, make_criterion
from .services.experiments import convergence_csv, run_convergence
from .services.primes import crt_compose, sieve_band
from .services.rule import (
    constant_integrand,
    kink_integrand,
    load_trig_integrand,
    randomized_integrate,
    step_integrand,
)
from .services.space import space_from_mapping
from .shared.config import get_seed, settings
from .shared.models import BoundParams, ExperimentConfig, GeneratingVector, Integrand, KorobovSpace
from .shared.utils.exceptions import BoundViolationError, ProcessingError, RandLatticeException, ValidationError
from .shared.utils.logging import get_logger, setup_logging
from .shared.utils.serialization import (
    format_certificates,
    format_composed,
    format_residue_map,
    load_config_file,
    parse_residue_map,
    serialize_pydantic_model,
    serialize_report,
)
from .shared.utils.validation import validate_pydantic_model

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2


def _float_list(text: str) -> List[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _int_list(text: str) -> List[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Key-value configuration file (TOML syntax).")
    common.add_argument("--n", type=int, help="Band parameter: primes in (n/2, n].")
    common.add_argument("--d", type=int, help="Dimension.")
    common.add_argument("--alpha", type=float, help="Smoothness of the Korobov space.")
    common.add_argument("--lambda", type=float, dest="lam", help="Exponent lambda in (0, alpha), default alpha/2.")
    common.add_argument("--weights", type=_float_list, help="Product weights gamma_1,gamma_2,... (last value extends).")
    common.add_argument("--seed", type=int, help="Root seed (default: RANDLATTICE_SEED or built-in).")
    common.add_argument("--max-tries", type=int, dest="max_tries", help="Draws per prime during construction.")
    common.add_argument("--z", type=_int_list, help="Use this integer vector modulo every prime instead of searching.")
    common.add_argument("--residues", type=Path, help="Residue map file with lines 'p: z1 ... zd', as written by construct.")
    common.add_argument("--json", action="store_true", help="Emit JSON instead of text lines.")
    common.add_argument("--log-level", dest="log_level", help="Logging level (default from settings).")
    common.add_argument("--log-format", dest="log_format", choices=["console", "json"], help="Log record format on stderr.")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--reps", type=int, help="Number of independent repetitions m.")
    sampling.add_argument("--shift", action=argparse.BooleanOptionalAction, default=None, help="Use a random shift.")
    sampling.add_argument(
        "--integrand",
        help="constant, step, kink, extremal, witness, or a coefficient file with lines 'h1 ... hd  re im'.",
    )
    sampling.add_argument("--kink-exponent", type=float, dest="kink_exponent", help="Exponent of the kink integrand.")

    searching = argparse.ArgumentParser(add_help=False)
    searching.add_argument("--box", type=int, help="Box radius H (default: hyperbolic cross search).")
    searching.add_argument("--adaptive", action="store_true", default=None, help="Double H until certified.")

    parser = argparse.ArgumentParser(prog="randlattice", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    construct = commands.add_parser("construct", parents=[common], help="Build a generating vector.")
    construct.add_argument("--composed", action="store_true", help="Also print the CRT-composed vector.")

    commands.add_parser("integrate", parents=[common, sampling], help="Run the randomized rule.")
    rms = commands.add_parser("rms-exact", parents=[common, searching], help="Exact worst-case RMS error.")
    rms.add_argument("--method", choices=["cross", "box"], help="Search region.")
    rms.add_argument("--reps", type=int, help="Also estimate empirical errors on the extremal mode from m draws.")
    rms.add_argument("--shift", action=argparse.BooleanOptionalAction, default=None, help="Use a random shift.")
    commands.add_parser("rms-empirical", parents=[common, sampling, searching], help="Empirical RMS error.")
    commands.add_parser("ran-empirical", parents=[common, sampling, searching], help="Empirical randomized error.")

    bounds = commands.add_parser("bounds", parents=[common], help="Theoretical bounds.")
    bounds.add_argument("--r", type=int, help="Moment order r >= 1/(2 lambda).")
    bounds.add_argument("--eps", type=float, help="Select lambda and r from the rate loss eps.")

    convergence = commands.add_parser("convergence", parents=[common, searching], help="Convergence study.")
    convergence.add_argument("--n-grid", type=_int_list, dest="n_grid", help="Comma-separated n values.")
    convergence.add_argument("--reps", type=int, help="Empirical repetitions per row (0 disables).")
    convergence.add_argument("--eps", type=float, help="Select lambda and r from the rate loss eps.")
    convergence.add_argument("--output", help="CSV path (default: stdout).")
    convergence.add_argument("--no-check", action="store_true", dest="no_check", help="Disable bound assertions.")
    convergence.add_argument("--workers", type=int, help="Rows computed in parallel.")
    return parser


class Options:
    """Command-line flags layered over the configuration file."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: Dict[str, Any] = load_config_file(args.config) if args.config else {}

    def get(self, name: str, default: Any = None, key: Optional[str] = None) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        return self.file.get(key or name, default)

    def space(self) -> KorobovSpace:
        data = dict(self.file)
        data["alpha"] = self.get("alpha", 0.5)
        data["d"] = self.get("d", 1)
        if self.args.weights is not None:
            data["weights"] = {**data.get("weights", {}), "product": self.args.weights}
        return space_from_mapping(data)


def _vector(options: Options, space: KorobovSpace, n: int) -> GeneratingVector:
    band = sieve_band(n)
    crit = make_criterion(space, options.get("lam", key="lambda"))
    z = options.get("z")
    if z is not None:
        return constant_vector(band, z, crit)
    if options.args.residues is not None:
        try:
            text = options.args.residues.read_text()
        except OSError as e:
            raise ProcessingError(f"Failed to read residue map {options.args.residues}: {e}")
        residues, _ = parse_residue_map(text)
        return certify_residues(band, residues, crit)
    seed = get_seed(options.get("seed"))
    return build_generating_vector(band, crit, seed, options.get("max_tries", settings.max_search_tries))


def _integrand(options: Options, space: KorobovSpace, gv: GeneratingVector, default: str) -> Integrand:
    name = options.get("integrand", default)
    if name == "constant":
        return constant_integrand(space.dimension)
    if name == "step":
        return step_integrand(space.dimension)
    if name == "kink":
        return kink_integrand(space.dimension, options.get("kink_exponent", space.alpha))
    if name == "witness":
        return witness_integrand(gv.band, space)
    if name == "extremal":
        report = rms_exact(gv, space, options.get("box"), bool(options.get("adaptive", False)))
        return extremal_integrand(space, report.maximizer)
    return load_trig_integrand(Path(name))


def _format_estimate(value: complex) -> str:
    return repr(value.real) if value.imag == 0 else f"{value.real!r} {value.imag!r}"


def cmd_construct(options: Options) -> int:
    space = options.space()
    gv = _vector(options, space, options.get("n", 20))
    if options.args.json:
        print(serialize_pydantic_model(gv))
        return EXIT_OK
    sys.stdout.write(format_residue_map(gv.residues.per_prime))
    sys.stdout.write(format_certificates({p: (c.value, c.threshold) for p, c in gv.certificates.items()}))
    if options.args.composed:
        sys.stdout.write(format_composed(crt_compose(gv.residues, gv.band)))
    return EXIT_OK if gv.is_certified() else EXIT_CHECK_FAILED


def cmd_integrate(options: Options) -> int:
    space = options.space()
    gv = _vector(options, space, options.get("n", 20))
    f = _integrand(options, space, gv, "constant")
    reps = options.get("reps", 1)
    estimates = randomized_integrate(f, gv, get_seed(options.get("seed")), options.get("shift", True), reps)
    mean = complex(estimates.mean())
    stderr = float(estimates.std(ddof=1)) / math.sqrt(reps) if reps > 1 else 0.0
    if options.args.json:
        print(serialize_report({"estimates": [complex(value) for value in estimates], "mean": mean, "stderr": stderr}))
        return EXIT_OK
    for value in estimates:
        print(_format_estimate(complex(value)))
    print(f"mean={_format_estimate(mean)} stderr={stderr!r}")
    return EXIT_OK


def cmd_rms_exact(options: Options) -> int:
    space = options.space()
    n = options.get("n", 20)
    gv = _vector(options, space, n)
    report = rms_exact(gv, space, options.get("box"), bool(options.get("adaptive", False)), options.get("method"))
    reps = options.get("reps")
    if reps is not None:
        report = attach_empirical(report, gv, space, get_seed(options.get("seed")), reps, options.get("shift", True))
    if options.args.json:
        lam = options.get("lam", space.alpha / 2, key="lambda")
        report = attach_bounds(report, gv.band, space, lam, smallest_order(lam), make_criterion(space, lam).mu)
        print(serialize_pydantic_model(report))
    else:
        print(report.summary())
    return EXIT_OK if report.certified else EXIT_CHECK_FAILED


def _cmd_empirical(options: Options, estimator, label: str) -> int:
    space = options.space()
    gv = _vector(options, space, options.get("n", 20))
    f = _integrand(options, space, gv, "extremal")
    estimate = estimator(f, gv, get_seed(options.get("seed")), options.get("reps", 1000), options.get("shift", True))
    if options.args.json:
        print(serialize_pydantic_model(estimate))
    else:
        print(f"{label}={estimate.value!r} stderr={estimate.stderr!r} reps={estimate.repetitions}")
    return EXIT_OK


def cmd_rms_empirical(options: Options) -> int:
    return _cmd_empirical(options, rms_empirical, "rms")


def cmd_ran_empirical(options: Options) -> int:
    return _cmd_empirical(options, ran_empirical, "ran")


def cmd_bounds(options: Options) -> int:
    space = options.space()
    n = options.get("n", 100)
    eps = options.get("eps")
    if eps is not None:
        lam, r = select_parameters(space.alpha, eps)
    else:
        lam = options.get("lam", space.alpha / 2, key="lambda")
        r = options.get("r", smallest_order(lam))
    mu = make_criterion(space, lam).mu
    params = BoundParams(n=n, lam=lam, r=r, mu=mu, alpha=space.alpha, c1=settings.c1, c2=settings.c2, c3=settings.c3)
    theorem = theorem1_bound(params)
    lower = lower_bound(n, space.weight((1,)), space.alpha)
    print(f"theorem1={theorem!r} naive={naive_bound(n, lam, mu)!r} lower={lower!r}")
    return EXIT_OK


def cmd_convergence(options: Options) -> int:
    space = options.space()
    config = validate_pydantic_model(
        ExperimentConfig,
        {
            "space": space,
            "n_grid": tuple(options.get("n_grid", [64, 128, 256, 512, 1024])),
            "seed": get_seed(options.get("seed")),
            "lam": options.get("lam", key="lambda"),
            "eps": options.get("eps"),
            "repetitions": options.get("reps", 0),
            "box": options.get("box"),
            "adaptive": bool(options.get("adaptive", False)),
            "max_tries": options.get("max_tries", settings.max_search_tries),
            "check_bounds": not options.args.no_check,
            "output": options.get("output"),
        },
    )
    result = run_convergence(config, options.get("workers"))
    if config.output is None:
        sys.stdout.write(convergence_csv(result))
    if result.fit is not None:
        fit = result.fit
        print(f"slope={fit.slope!r} intercept={fit.intercept!r} residual={fit.residual!r}", file=sys.stderr)
    if result.excluded and config.check_bounds:
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMANDS = {
    "construct": cmd_construct,
    "integrate": cmd_integrate,
    "rms-exact": cmd_rms_exact,
    "rms-empirical": cmd_rms_empirical,
    "ran-empirical": cmd_ran_empirical,
    "bounds": cmd_bounds,
    "convergence": cmd_convergence,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        setup_logging("randlattice", args.log_level, args.log_format)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    try:
        options = Options(args)
        return COMMANDS[args.command](options)
    except BoundViolationError as e:
        logger.error("Bound check failed", error=str(e))
        return EXIT_CHECK_FAILED
    except (RandLatticeException, PydanticValidationError) as e:
        logger.error("Invalid input", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

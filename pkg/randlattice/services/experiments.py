"""Convergence studies over a grid of band parameters n."""

import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..shared.config import settings
from ..shared.models import ConvergenceResult, ConvergenceRow, ExperimentConfig, SlopeFit
from ..shared.utils.exceptions import BoundViolationError, DomainError
from ..shared.utils.logging import get_logger, log_context
from ..shared.utils.serialization import csv_text, write_csv
from ..shared.utils.streams import RandomStreams
from .analysis import attach_bounds, attach_empirical, rms_exact
from .bounds import select_parameters, smallest_order
from .construct import build_generating_vector, make_criterion
from .primes import sieve_band

logger = get_logger(__name__)

CSV_HEADER = (
    "n",
    "L",
    "rms_exact",
    "certified",
    "h*",
    "theorem1_bound",
    "naive_bound",
    "lower_bound",
    "empirical_rms",
    "empirical_stderr",
    "construction_seed",
)


def experiment_parameters(config: ExperimentConfig) -> Tuple[float, int]:
    """(lambda, r) from eps when given, else lambda (default alpha/2) with the smallest admissible r."""
    if config.eps is not None:
        return select_parameters(config.space.alpha, config.eps)
    lam = config.lam if config.lam is not None else config.space.alpha / 2
    return lam, smallest_order(lam)


def run_row(config: ExperimentConfig, n: int) -> ConvergenceRow:
    """
    Construct, analyse and bound the rule for one n.

    Raises:
        BoundViolationError: If a certified error falls below the lower bound
    """
    construction_seed = RandomStreams(config.seed).fork(n).seed
    with log_context(n=n, construction_seed=construction_seed):
        return _run_row(config, n, construction_seed)


def _run_row(config: ExperimentConfig, n: int, construction_seed: int) -> ConvergenceRow:
    lam, r = experiment_parameters(config)
    crit = make_criterion(config.space, lam)
    band = sieve_band(n)
    gv = build_generating_vector(band, crit, construction_seed, config.max_tries)
    report = rms_exact(gv, config.space, config.box, config.adaptive)
    if config.repetitions >= 2:
        sample_seed = RandomStreams(construction_seed).fork(0).seed
        report = attach_empirical(report, gv, config.space, sample_seed, config.repetitions)
    report = attach_bounds(report, band, config.space, lam, r, crit.mu)
    empirical = report.empirical_rms

    lower = report.bounds.get("lower")
    if config.check_bounds and report.certified and n >= settings.lower_bound_min_n and lower is not None:
        if lower > report.rms_exact:
            raise BoundViolationError(
                "Certified RMS error below the lower bound",
                {"n": n, "rms": report.rms_exact, "lower": lower, "construction_seed": construction_seed},
            )

    logger.info("Convergence row", rms=report.rms_exact, certified=report.certified)
    return ConvergenceRow(
        n=n,
        L=band.size,
        rms_exact=report.rms_exact,
        certified=report.certified,
        h_star=" ".join(str(c) for c in report.maximizer),
        theorem1_bound=report.bounds.get("theorem1"),
        naive_bound=report.bounds["naive"],
        lower_bound=lower,
        empirical_rms=empirical.value if empirical else None,
        empirical_stderr=empirical.stderr if empirical else None,
        construction_seed=construction_seed,
    )


def fit_slope(points: Sequence[Tuple[float, float]]) -> SlopeFit:
    """
    Least-squares line through (ln n, ln rms).

    Raises:
        DomainError: With fewer than three points or non-positive values
    """
    if len(points) < 3:
        raise DomainError(f"need at least 3 rows to fit a slope, got {len(points)}")
    n, rms = np.asarray(points, dtype=float).T
    if np.any(n <= 0) or np.any(rms <= 0):
        raise DomainError("slope fit needs positive n and rms values")
    x, y = np.log(n), np.log(rms)
    slope, intercept = np.polyfit(x, y, 1)
    residual = math.sqrt(float(np.mean((y - (slope * x + intercept)) ** 2)))
    return SlopeFit(slope=float(slope), intercept=float(intercept), residual=residual)


def fit_rows(rows: Sequence[ConvergenceRow]) -> SlopeFit:
    return fit_slope([(row.n, row.rms_exact) for row in rows if row.certified])


def run_convergence(config: ExperimentConfig, max_workers: Optional[int] = None) -> ConvergenceResult:
    """Rows for every n of the grid, ordered by n, and the fitted rate over certified rows."""
    if config.space.dimension > settings.max_exact_dimension:
        raise DomainError(f"convergence studies need d <= {settings.max_exact_dimension}")
    max_workers = settings.max_workers if max_workers is None else max_workers
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(lambda n: run_row(config, n), config.n_grid))
    else:
        rows = [run_row(config, n) for n in config.n_grid]

    excluded = [row.n for row in rows if not row.certified]
    if excluded:
        logger.warning("Uncertified rows excluded from the fit", n=excluded)
    certified = [row for row in rows if row.certified]
    fit = fit_rows(certified) if len(certified) >= 3 else None
    result = ConvergenceResult(rows=rows, fit=fit, excluded=excluded)
    if config.output:
        write_result_csv(result, Path(config.output))
    return result


def _cells(row: ConvergenceRow) -> List:
    return [
        row.n,
        row.L,
        row.rms_exact,
        row.certified,
        row.h_star,
        row.theorem1_bound,
        row.naive_bound,
        row.lower_bound,
        row.empirical_rms,
        row.empirical_stderr,
        row.construction_seed,
    ]


def convergence_csv(result: ConvergenceResult) -> str:
    return csv_text(CSV_HEADER, (_cells(row) for row in result.rows))


def write_result_csv(result: ConvergenceResult, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        write_csv(CSV_HEADER, (_cells(row) for row in result.rows), handle)

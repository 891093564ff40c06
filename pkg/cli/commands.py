"""
Command bodies. Each prints its result to stdout (JSON object or CSV with a
header) or writes it to --out; diagnostics go through logging to stderr.
"""
import logging
import math
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cli.cli_config import RunConfig
from shared.errors import DegenerateSampleError
from shared.models import FitReport, GeodesicState, ParetoParams, PosteriorSummary, SufficientStats
from src import bayes, data_io, geometry, model
from src.utils import format_real

logger = logging.getLogger("cli.commands")

CURVE_KINDS = ("joint", "marginal_alpha", "marginal_beta", "predictive")


def _emit(text: str, out_path: Optional[str] = None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
        logger.info(f"Wrote {out_path}")
    else:
        print(text.rstrip("\n"))


def _load_stats(input_path: str) -> SufficientStats:
    samples = data_io.read_sample_file(input_path)
    stats = model.sufficient_stats(samples)
    logger.info(f"Loaded {stats.n} observations from {input_path}: q1={stats.q1}, q2={stats.q2}")
    return stats


def _summary_rows(
    stats: SufficientStats,
    reference: ParetoParams,
    known_alpha: Optional[float],
    known_beta: Optional[float],
    tol: float,
) -> List[PosteriorSummary]:
    if known_alpha is None and known_beta is None:
        return bayes.table2_summary(stats, reference, tol)
    rows: List[PosteriorSummary] = []
    if known_alpha is not None:
        rows += bayes.posterior_rows(stats, "known_alpha", known_alpha, reference, tol)
    if known_beta is not None:
        rows += bayes.posterior_rows(stats, "known_beta", known_beta, reference, tol)
    return rows


def _emit_report(report: FitReport, run_cfg: RunConfig, out_path: Optional[str] = None) -> None:
    if run_cfg.output_format == "csv":
        _emit(data_io.summary_to_csv(report.rows, run_cfg.precision), out_path)
    else:
        _emit(data_io.fit_report_to_json(report, run_cfg.precision), out_path)


# ==================== SAMPLING & FITTING ====================


def cmd_sample(alpha: float, beta: float, n: int, out_path: str, run_cfg: RunConfig) -> None:
    params = ParetoParams(alpha=alpha, beta=beta)
    samples = model.sample(params, run_cfg.seed, n)
    data_io.write_sample_file(out_path, samples)
    stats = model.sufficient_stats(samples)
    payload = {
        "stats": stats.model_dump(mode="json"),
        "mle": None if stats.is_degenerate else model.mle(stats).model_dump(mode="json"),
        "seed": run_cfg.seed,
        "path": str(out_path),
    }
    _emit(data_io.to_json(payload, run_cfg.precision))


def cmd_fit(
    input_path: str,
    known_alpha: Optional[float],
    known_beta: Optional[float],
    run_cfg: RunConfig,
) -> None:
    stats = _load_stats(input_path)
    reference = run_cfg.reference_params
    rows = _summary_rows(stats, reference, known_alpha, known_beta, run_cfg.tolerance)
    report = FitReport(
        stats=stats,
        mle=model.mle(stats),
        reference=reference,
        known_alpha=known_alpha,
        known_beta=known_beta,
        rows=rows,
    )
    _emit_report(report, run_cfg)


def cmd_simulate(
    alpha: float,
    beta: float,
    n: int,
    reference: Optional[str],
    out_path: Optional[str],
    run_cfg: RunConfig,
) -> None:
    """Draw n points at (alpha, beta) and tabulate every estimator against the truth."""
    truth = ParetoParams(alpha=alpha, beta=beta)
    reference_params = ParetoParams.parse(reference) if reference else truth
    samples = model.sample(truth, run_cfg.seed, n)
    if out_path:
        data_io.write_sample_file(out_path, samples)
    stats = model.sufficient_stats(samples)
    logger.info(f"Simulated n={n} at ({alpha}, {beta}) with seed {run_cfg.seed}")
    report = FitReport(
        stats=stats,
        mle=model.mle(stats),
        reference=reference_params,
        rows=bayes.table2_summary(stats, reference_params, run_cfg.tolerance),
    )
    _emit_report(report, run_cfg)


# ==================== GEOMETRY ====================


def cmd_distance(a0: float, b0: float, a1: float, b1: float, run_cfg: RunConfig) -> None:
    d = geometry.distance(ParetoParams(alpha=a0, beta=b0), ParetoParams(alpha=a1, beta=b1))
    print(format_real(d, run_cfg.precision))


def cmd_geodesic(alpha: float, beta: float, theta: float, t: float, steps: int, run_cfg: RunConfig) -> None:
    start = ParetoParams(alpha=alpha, beta=beta)
    state = GeodesicState(start=start, theta0=theta, t=t)
    closed = geometry.geodesic_closed_form(state)
    numeric = geometry.geodesic_ode(state, steps)
    deviation = max(abs(closed.alpha - numeric.alpha), abs(closed.beta - numeric.beta))
    payload = {
        "start": start.model_dump(mode="json"),
        "theta0": state.theta0,
        "t": t,
        "closed_form": closed.model_dump(mode="json"),
        "rk4": numeric.model_dump(mode="json"),
        "max_deviation": deviation,
        "distance_from_start": geometry.distance(start, closed),
    }
    # Closed form and RK4 agree far below the default print precision.
    _emit(data_io.to_json(payload, max(run_cfg.precision, 12)))


def cmd_ball(
    alpha: float,
    beta: float,
    radius: float,
    rays: int,
    steps: int,
    out_path: Optional[str],
    run_cfg: RunConfig,
) -> None:
    polylines = geometry.geodesic_ball(ParetoParams(alpha=alpha, beta=beta), radius, rays, steps)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            data_io.write_ball_csv(polylines, handle, run_cfg.precision)
        logger.info(f"Wrote {out_path}")
    else:
        data_io.write_ball_csv(polylines, sys.stdout, run_cfg.precision)


# ==================== CURVES ====================


def _beta_window(stats: SufficientStats, count: int) -> np.ndarray:
    g = bayes.marginal_beta_posterior(stats)
    sd = math.sqrt(g.variance)
    return np.linspace(max(g.mean - 5.0 * sd, g.mean / 100.0), g.mean + 5.0 * sd, count)


def _alpha_window(stats: SufficientStats, count: int) -> np.ndarray:
    return np.linspace(bayes.marginal_alpha_quantile(1e-6, stats), 1.01 * stats.q1, count)


def curve_table(
    kind: str,
    stats: SufficientStats,
    grid: Optional[np.ndarray] = None,
    beta_grid: Optional[np.ndarray] = None,
    reference: Optional[ParetoParams] = None,
) -> Tuple[Sequence[str], List[Tuple[float, ...]]]:
    """Columns and rows of a density curve over a grid (defaults derive from the statistics)."""
    if stats.is_degenerate:
        raise DegenerateSampleError("degenerate sample: the posterior is improper, nothing to plot")
    if kind == "marginal_alpha":
        xs = _alpha_window(stats, 401) if grid is None else grid
        return ("alpha", "density"), [(float(a), bayes.marginal_alpha_pdf(float(a), stats)) for a in xs]

    if kind == "marginal_beta":
        g = bayes.marginal_beta_posterior(stats)
        xs = _beta_window(stats, 401) if grid is None else grid
        return ("beta", "density"), [(float(b), bayes.gamma_pdf(float(b), g)) for b in xs]

    if kind == "predictive":
        xs = np.linspace(stats.q1 / 100.0, 4.0 * stats.q1, 800) if grid is None else grid
        if reference is None:
            rows = [(float(x), bayes.predictive_pdf(float(x), stats)) for x in xs]
            return ("x", "density"), rows
        rows = [
            (float(x), bayes.predictive_pdf(float(x), stats), model.pdf(float(x), reference))
            for x in xs
        ]
        return ("x", "density", "reference_density"), rows

    if kind == "joint":
        alphas = _alpha_window(stats, 101) if grid is None else grid
        betas = _beta_window(stats, 101) if beta_grid is None else beta_grid
        rows = [
            (float(a), float(b), math.exp(bayes.log_joint_posterior(float(a), float(b), stats)))
            for a in alphas
            for b in betas
        ]
        return ("alpha", "beta", "density"), rows

    raise ValueError(f"unknown curve kind {kind!r}; expected one of {', '.join(CURVE_KINDS)}")


def cmd_curves(
    input_path: str,
    kind: str,
    grid: Optional[str],
    beta_grid: Optional[str],
    out_path: Optional[str],
    run_cfg: RunConfig,
) -> None:
    stats = _load_stats(input_path)
    columns, rows = curve_table(
        kind,
        stats,
        data_io.parse_grid(grid) if grid else None,
        data_io.parse_grid(beta_grid) if beta_grid else None,
        run_cfg.reference_params,
    )
    logger.info(f"Evaluated {kind} curve at {len(rows)} points")
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            data_io.write_curve_csv(columns, rows, handle, run_cfg.precision)
        logger.info(f"Wrote {out_path}")
    else:
        data_io.write_curve_csv(columns, rows, sys.stdout, run_cfg.precision)


# ==================== CHECKS ====================


def cmd_check(
    input_path: str,
    known_alpha: Optional[float],
    known_beta: Optional[float],
    run_cfg: RunConfig,
) -> None:
    """Normalization of every proper density plus the posterior-mean bounds, for one data file."""
    stats = _load_stats(input_path)
    integrals = bayes.normalization_integrals(stats, known_alpha, known_beta, run_cfg.tolerance)
    mean = bayes.posterior_mean_alpha(stats, run_cfg.tolerance)
    lo, hi = bayes.posterior_mean_alpha_bounds(stats)
    payload = {
        "stats": stats.model_dump(mode="json"),
        "integrals": {
            name: {
                "value": result.value,
                "abs_error_estimate": result.abs_error_estimate,
                "evaluations": result.evaluations,
            }
            for name, result in integrals.items()
        },
        "posterior_mean_alpha": mean,
        "bounds": [lo, hi],
        "within_bounds": lo <= mean <= hi,
    }
    # Masses are reported to full precision; the point is how close to 1 they get.
    _emit(data_io.to_json(payload, 15))

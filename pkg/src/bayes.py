"""
Jeffreys-prior Bayesian inference for Pareto data.

The Jeffreys prior of the family is its Riemannian volume density, 1/alpha.
With it the joint posterior is proper as soon as the sample is not
degenerate, and every quantity below depends on the data only through the
sufficient statistics (n, q1, q2). Throughout, R = q2 - n log q1 and
beta_hat = n / R.

All densities are evaluated in log space and exponentiated last: R^n with
n in the hundreds overflows otherwise.
"""
import logging
import math
from typing import Dict, List, Optional

import numpy as np

import config
from shared.errors import AlphaExceedsMinimumError, DegenerateSampleError, DomainError
from shared.models import (
    Conditioning,
    GammaPosterior,
    ParetoParams,
    PosteriorSummary,
    SufficientStats,
)
from src import geometry, model
from src.numerics import (
    QuadratureResult,
    bisect_root,
    gamma_cdf,
    log_gamma,
    quad_adaptive,
    quad_semi_infinite,
)

logger = logging.getLogger("paretogeo.bayes")

# Posterior mass of alpha left below the quadrature cut; added back in closed form.
LOWER_TAIL_MASS = 1e-14


def _require_proper(s: SufficientStats) -> None:
    if s.is_degenerate:
        raise DegenerateSampleError(
            "degenerate sample: q2 = n log q1, the posterior is improper"
        )


def _require_alpha(s: SufficientStats, alpha: float) -> float:
    if not (alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if alpha > s.q1:
        raise AlphaExceedsMinimumError(alpha, s.q1)
    rate = s.q2 - s.n * math.log(alpha)
    if rate <= 0:
        raise DegenerateSampleError("q2 - n log alpha is not positive")
    return rate


def _beta_hat(s: SufficientStats) -> float:
    return s.n / s.spread


# ==================== PRIOR & JOINT ====================


def jeffreys_prior_unnorm(p: ParetoParams) -> float:
    """Improper Jeffreys prior, proportional to 1/alpha with constant 1."""
    return geometry.volume_density(p)


def log_joint_posterior(alpha: float, beta: float, s: SufficientStats) -> float:
    if not (0 < alpha <= s.q1) or not (beta > 0):
        return -math.inf
    n = s.n
    return (
        math.log(n)
        + n * math.log(s.spread)
        - log_gamma(n)
        + n * math.log(beta)
        + (n * beta - 1.0) * math.log(alpha)
        - s.q2 * beta
    )


def joint_posterior_pdf(p: ParetoParams, s: SufficientStats) -> float:
    _require_proper(s)
    return math.exp(log_joint_posterior(p.alpha, p.beta, s))


# ==================== MARGINAL OF ALPHA ====================


def marginal_alpha_pdf(alpha: float, s: SufficientStats) -> float:
    if not (0 < alpha <= s.q1):
        return 0.0
    n = s.n
    log_value = (
        2.0 * math.log(n)
        + n * math.log(s.spread)
        - math.log(alpha)
        - (n + 1) * math.log(s.q2 - n * math.log(alpha))
    )
    return math.exp(log_value)


def marginal_alpha_cdf(t: float, s: SufficientStats) -> float:
    """Pr(alpha <= t | x) = 1 / [1 + beta_hat log(q1 / t)]^n."""
    if t <= 0:
        return 0.0
    if t >= s.q1:
        return 1.0
    value = math.exp(-s.n * math.log1p(_beta_hat(s) * math.log(s.q1 / t)))
    return min(1.0, max(0.0, value))


def marginal_alpha_quantile(prob: float, s: SufficientStats) -> float:
    """Closed-form inverse of marginal_alpha_cdf."""
    if not (0.0 <= prob <= 1.0):
        raise DomainError(f"probability must lie in [0, 1], got {prob!r}")
    if prob == 0.0:
        return 0.0
    offset = math.expm1(-math.log(prob) / s.n)
    return s.q1 * math.exp(-offset / _beta_hat(s))


def posterior_median_alpha(s: SufficientStats) -> float:
    """alpha_hat exp((1 - 2^(1/n)) / beta_hat)."""
    _require_proper(s)
    return s.q1 * math.exp(-math.expm1(math.log(2.0) / s.n) / _beta_hat(s))


def posterior_mean_alpha_bounds(s: SufficientStats):
    """((n-1) b - 1) / ((n-1) b) a <= E(alpha | x) <= n b / (n b + 1) a, with (a, b) the MLE."""
    _require_proper(s)
    beta_hat = _beta_hat(s)
    spread_below = (s.n - 1) * beta_hat
    lo = (spread_below - 1.0) / spread_below * s.q1 if spread_below > 0 else -math.inf
    hi = s.n * beta_hat / (s.n * beta_hat + 1.0) * s.q1
    return lo, hi


def posterior_mean_alpha(s: SufficientStats, tol: float = config.QUAD_TOLERANCE) -> float:
    """E(alpha | x) = alpha_hat - integral over (0, alpha_hat) of Pr(alpha <= t | x) dt.

    The CDF is below LOWER_TAIL_MASS left of its matching quantile, so the
    integral starts there; the skipped area is at most cut * LOWER_TAIL_MASS.
    """
    _require_proper(s)
    cut = marginal_alpha_quantile(LOWER_TAIL_MASS, s)
    area = quad_adaptive(lambda t: marginal_alpha_cdf(t, s), cut, s.q1, tol, min_panels=8)
    mean = s.q1 - area.value
    lo, hi = posterior_mean_alpha_bounds(s)
    if not (lo - area.abs_error_estimate <= mean <= hi + area.abs_error_estimate):
        logger.warning(f"Posterior mean of alpha {mean!r} outside bounds [{lo!r}, {hi!r}]")
    return mean


# ==================== MARGINAL OF BETA ====================


def marginal_beta_posterior(s: SufficientStats) -> GammaPosterior:
    _require_proper(s)
    return GammaPosterior(shape=s.n, rate=s.spread)


def gamma_pdf(beta: float, g: GammaPosterior) -> float:
    if beta <= 0:
        return 0.0
    log_value = (
        g.shape * math.log(g.rate)
        + (g.shape - 1.0) * math.log(beta)
        - g.rate * beta
        - log_gamma(g.shape)
    )
    return math.exp(log_value)


def gamma_mean(g: GammaPosterior) -> float:
    return g.mean


def gamma_posterior_cdf(beta: float, g: GammaPosterior) -> float:
    return gamma_cdf(beta, g.shape, g.rate)


def gamma_median(g: GammaPosterior, tol: float = config.ROOT_TOLERANCE) -> float:
    hi = g.mean
    while gamma_cdf(hi, g.shape, g.rate) < 0.5:
        hi *= 2.0
    return bisect_root(lambda b: gamma_cdf(b, g.shape, g.rate) - 0.5, 0.0, hi, tol)


def posterior_median_beta(s: SufficientStats) -> float:
    return gamma_median(marginal_beta_posterior(s))


def sample_beta_posterior(s: SufficientStats, seed: int, size: int) -> np.ndarray:
    g = marginal_beta_posterior(s)
    return model.make_generator(seed).gamma(shape=g.shape, scale=1.0 / g.rate, size=size)


def normal_approximation_gap(s: SufficientStats, n_points: int = 2001) -> float:
    """Sup-distance between the Gamma posterior CDF of beta and Normal(beta_hat, beta_hat^2 / n)."""
    g = marginal_beta_posterior(s)
    beta_hat = g.mean
    sd = beta_hat / math.sqrt(s.n)
    grid = np.linspace(max(beta_hat - 6.0 * sd, 0.0), beta_hat + 6.0 * sd, n_points)
    gap = 0.0
    for b in grid:
        normal = 0.5 * (1.0 + math.erf((b - beta_hat) / (sd * math.sqrt(2.0))))
        gap = max(gap, abs(gamma_posterior_cdf(float(b), g) - normal))
    return gap


# ==================== CONDITIONALS ====================


def conditional_alpha_pdf(alpha: float, s: SufficientStats, beta: float) -> float:
    """p(alpha | x, beta) = n beta alpha^(n beta - 1) / q1^(n beta) on (0, q1]."""
    if not (beta > 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    if not (0 < alpha <= s.q1):
        return 0.0
    nb = s.n * beta
    return math.exp(math.log(nb) + (nb - 1.0) * math.log(alpha) - nb * math.log(s.q1))


def conditional_alpha_cdf(t: float, s: SufficientStats, beta: float) -> float:
    if not (beta > 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    if t <= 0:
        return 0.0
    if t >= s.q1:
        return 1.0
    return math.exp(s.n * beta * math.log(t / s.q1))


def conditional_beta_posterior(s: SufficientStats, alpha: float) -> GammaPosterior:
    rate = _require_alpha(s, alpha)
    return GammaPosterior(shape=s.n + 1, rate=rate)


def posterior_median_alpha_given_beta(s: SufficientStats, beta: float) -> float:
    if not (beta > 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    return s.q1 * 2.0 ** (-1.0 / (s.n * beta))


def posterior_mean_alpha_given_beta(s: SufficientStats, beta: float) -> float:
    if not (beta > 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    nb = s.n * beta
    return nb / (nb + 1.0) * s.q1


# ==================== PREDICTIVES ====================


def _log_predictive(log_x: float, s: SufficientStats) -> float:
    n = s.n
    if log_x < s.log_q1:
        bracket = s.q2 - n * log_x
    else:
        bracket = s.spread + (log_x - s.log_q1)
    return (
        2.0 * math.log(n)
        + n * math.log(s.spread)
        - math.log(n + 1)
        - log_x
        - (n + 1) * math.log(bracket)
    )


def predictive_pdf(x_new: float, s: SufficientStats) -> float:
    """Posterior predictive density with alpha and beta unknown; cusp at x = q1."""
    _require_proper(s)
    if x_new <= 0:
        return 0.0
    return math.exp(_log_predictive(math.log(x_new), s))


def predictive_cdf(x_new: float, s: SufficientStats) -> float:
    _require_proper(s)
    if x_new <= 0:
        return 0.0
    n = s.n
    if x_new < s.q1:
        return marginal_alpha_cdf(x_new, s) / (n + 1)
    w = math.log(x_new / s.q1)
    survival = math.exp(-n * math.log1p(w / s.spread))
    return 1.0 / (n + 1) + n / (n + 1) * (1.0 - survival)


def _log_predictive_given_alpha(log_x: float, s: SufficientStats, alpha: float, rate: float) -> float:
    n = s.n
    return (
        math.log(n + 1)
        + (n + 1) * math.log(rate)
        - log_x
        - (n + 2) * math.log(rate + log_x - math.log(alpha))
    )


def predictive_pdf_given_alpha(x_new: float, s: SufficientStats, alpha: float) -> float:
    rate = _require_alpha(s, alpha)
    if x_new < alpha:
        return 0.0
    return math.exp(_log_predictive_given_alpha(math.log(x_new), s, alpha, rate))


def _log_predictive_given_beta(log_x: float, s: SufficientStats, beta: float) -> float:
    n = s.n
    head = math.log(n / (n + 1) * beta) - log_x
    if log_x < s.log_q1:
        return head + n * beta * (log_x - s.log_q1)
    return head - beta * (log_x - s.log_q1)


def predictive_pdf_given_beta(x_new: float, s: SufficientStats, beta: float) -> float:
    """Piecewise: power growth x^(n beta - 1) below q1, Pareto tail x^(-beta - 1) above."""
    if not (beta > 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    if x_new <= 0:
        return 0.0
    return math.exp(_log_predictive_given_beta(math.log(x_new), s, beta))


# ==================== SUMMARIES ====================


def _row(kind, conditioning, alpha, beta, reference) -> PosteriorSummary:
    estimate = ParetoParams(alpha=alpha, beta=beta)
    return PosteriorSummary(
        estimator_kind=kind,
        conditioning=conditioning,
        alpha_hat=alpha,
        beta_hat=beta,
        distance_to_reference=geometry.distance(reference, estimate),
    )


def posterior_rows(
    s: SufficientStats,
    conditioning: Conditioning,
    value: Optional[float],
    reference: ParetoParams,
    tol: float = config.QUAD_TOLERANCE,
) -> List[PosteriorSummary]:
    """MLE, posterior median and posterior mean under one conditioning.

    `value` is the known alpha (known_alpha) or known beta (known_beta);
    it is ignored when nothing is conditioned on.
    """
    _require_proper(s)
    if conditioning == "none":
        estimate = model.mle(s)
        marginal_beta = marginal_beta_posterior(s)
        return [
            _row("mle", "none", estimate.alpha, estimate.beta, reference),
            _row("posterior_median", "none", posterior_median_alpha(s), gamma_median(marginal_beta), reference),
            _row("posterior_mean", "none", posterior_mean_alpha(s, tol), marginal_beta.mean, reference),
        ]
    if value is None:
        raise DomainError(f"conditioning {conditioning!r} needs a known value")
    if conditioning == "known_alpha":
        conditional = conditional_beta_posterior(s, value)
        return [
            _row("mle", conditioning, value, model.mle_beta_given_alpha(s, value), reference),
            _row("posterior_median", conditioning, value, gamma_median(conditional), reference),
            _row("posterior_mean", conditioning, value, conditional.mean, reference),
        ]
    if conditioning == "known_beta":
        return [
            _row("mle", conditioning, s.q1, value, reference),
            _row("posterior_median", conditioning, posterior_median_alpha_given_beta(s, value), value, reference),
            _row("posterior_mean", conditioning, posterior_mean_alpha_given_beta(s, value), value, reference),
        ]
    raise DomainError(f"unknown conditioning {conditioning!r}")


def table2_summary(
    s: SufficientStats, reference: ParetoParams, tol: float = config.QUAD_TOLERANCE
) -> List[PosteriorSummary]:
    """Nine estimator rows, conditioning on the reference parameters where known.

    A reference alpha above the smallest observation cannot be the true
    scale, so its three known_alpha rows are left out with a warning.
    """
    rows = posterior_rows(s, "none", None, reference, tol)
    if reference.alpha > s.q1:
        logger.warning(
            f"Reference alpha={reference.alpha} exceeds the minimum observation q1={s.q1}; "
            f"skipping the known_alpha rows"
        )
    else:
        rows += posterior_rows(s, "known_alpha", reference.alpha, reference, tol)
    rows += posterior_rows(s, "known_beta", reference.beta, reference, tol)
    logger.info(f"Built estimator table for n={s.n} against reference ({reference.alpha}, {reference.beta})")
    return rows


# ==================== NORMALIZATION ====================


def _closed_form_mass(value: float) -> QuadratureResult:
    return QuadratureResult(value, 0.0, 1)


def _log_scale_tail(log_density, log_start: float, tol: float) -> QuadratureResult:
    """Integral over x > exp(log_start) of a density given as log p(log x), via w = log x - log_start."""

    def integrand(w: float) -> float:
        log_x = log_start + w
        return math.exp(log_density(log_x) + log_x)

    return quad_semi_infinite(integrand, 0.0, tol)


def normalization_integrals(
    s: SufficientStats,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    tol: float = config.QUAD_TOLERANCE,
) -> Dict[str, QuadratureResult]:
    """Total mass of every proper posterior and predictive density, by quadrature.

    The alpha-singular lower tails are cut where the closed-form CDF falls
    below LOWER_TAIL_MASS and that mass is added back exactly; predictives are
    split at their cusp at q1, and heavy right tails are integrated in log x.
    alpha defaults to q1 and beta to beta_hat for the conditional densities.
    """
    _require_proper(s)
    alpha = s.q1 if alpha is None else alpha
    beta = _beta_hat(s) if beta is None else beta
    rate_alpha = _require_alpha(s, alpha)
    cut = marginal_alpha_quantile(LOWER_TAIL_MASS, s)
    cut_mass = _closed_form_mass(marginal_alpha_cdf(cut, s))
    results: Dict[str, QuadratureResult] = {}

    results["marginal_alpha"] = quad_adaptive(lambda a: marginal_alpha_pdf(a, s), cut, s.q1, tol) + cut_mass

    def beta_section(a: float) -> float:
        return quad_semi_infinite(lambda b: math.exp(log_joint_posterior(a, b, s)), 0.0, tol).value

    # Inner sections carry errors up to tol, so the outer rule cannot resolve below that.
    results["joint"] = quad_adaptive(beta_section, cut, s.q1, 100.0 * tol) + cut_mass

    marginal_beta = marginal_beta_posterior(s)
    results["marginal_beta"] = quad_semi_infinite(lambda b: gamma_pdf(b, marginal_beta), 0.0, tol)

    results["conditional_alpha"] = quad_adaptive(lambda a: conditional_alpha_pdf(a, s, beta), 0.0, s.q1, tol)

    conditional_beta = conditional_beta_posterior(s, alpha)
    results["conditional_beta"] = quad_semi_infinite(lambda b: gamma_pdf(b, conditional_beta), 0.0, tol)

    results["predictive"] = (
        quad_adaptive(lambda x: predictive_pdf(x, s), cut, s.q1, tol)
        + _closed_form_mass(marginal_alpha_cdf(cut, s) / (s.n + 1))
        + _log_scale_tail(lambda lx: _log_predictive(lx, s), s.log_q1, tol)
    )

    results["predictive_given_alpha"] = _log_scale_tail(
        lambda lx: _log_predictive_given_alpha(lx, s, alpha, rate_alpha), math.log(alpha), tol
    )

    results["predictive_given_beta"] = quad_adaptive(
        lambda x: predictive_pdf_given_beta(x, s, beta), 0.0, s.q1, tol
    ) + _log_scale_tail(lambda lx: _log_predictive_given_beta(lx, s, beta), s.log_q1, tol)

    for name, result in results.items():
        logger.debug(f"Mass of {name}: {result.value!r} (+/- {result.abs_error_estimate:.2e})")
    return results

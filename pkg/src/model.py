"""
The two-parameter Pareto distribution p(x | alpha, beta) = beta alpha^beta / x^(beta+1), x >= alpha.

Densities, inverse-transform sampling with a seeded counter-based generator,
sufficient statistics, maximum likelihood, and the negative-Hessian matrix
that is often mistaken for the Fisher-Rao metric of this family.
"""
import logging
import math
from typing import Iterable, Union

import numpy as np

from shared.errors import AlphaExceedsMinimumError, DegenerateSampleError, DomainError
from shared.models import ParetoParams, SampleSet, SufficientStats

logger = logging.getLogger("paretogeo.model")


def pdf(x: float, p: ParetoParams) -> float:
    if x < p.alpha:
        return 0.0
    return math.exp(log_likelihood(x, p))


def log_likelihood(x: float, p: ParetoParams) -> float:
    if x < p.alpha:
        return -math.inf
    return math.log(p.beta) + p.beta * math.log(p.alpha) - (p.beta + 1.0) * math.log(x)


def cdf(x: float, p: ParetoParams) -> float:
    if x <= p.alpha:
        return 0.0
    return -math.expm1(p.beta * math.log(p.alpha / x))


def ppf(u: float, p: ParetoParams) -> float:
    """Inverse CDF in the form used for sampling: alpha * u^(-1/beta), u in (0, 1]."""
    if not (0.0 < u <= 1.0):
        raise DomainError(f"ppf needs u in (0, 1], got {u!r}")
    return p.alpha * u ** (-1.0 / p.beta)


def score(x: float, p: ParetoParams) -> np.ndarray:
    """Gradient of the log-likelihood in (alpha, beta) at an observation x >= alpha."""
    return np.array([p.beta / p.alpha, 1.0 / p.beta + math.log(p.alpha) - math.log(x)])


# ==================== SAMPLING ====================


def make_generator(seed: int) -> np.random.Generator:
    """Seeded generator over the Philox counter-based bit generator.

    Streams are reproducible across platforms for a given seed.
    """
    return np.random.Generator(np.random.Philox(seed))


def open_uniforms(generator: np.random.Generator, n: int) -> np.ndarray:
    """n uniforms on the open interval (0, 1); exact zeros are redrawn."""
    u = generator.random(n)
    zeros = u == 0.0
    while np.any(zeros):
        u[zeros] = generator.random(int(zeros.sum()))
        zeros = u == 0.0
    return u


def sample(p: ParetoParams, seed: int, n: int) -> SampleSet:
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n!r}")
    u = open_uniforms(make_generator(seed), n)
    with np.errstate(over="ignore"):
        values = p.alpha * u ** (-1.0 / p.beta)
    if not np.all(np.isfinite(values)):
        logger.error(f"Pareto draws overflowed at alpha={p.alpha}, beta={p.beta}, seed={seed}")
        raise DomainError(
            f"beta={p.beta!r} is too small to sample: draws exceed the largest float (alpha={p.alpha!r})"
        )
    logger.debug(f"Drew {n} Pareto samples at alpha={p.alpha}, beta={p.beta}, seed={seed}")
    return SampleSet(values=values.tolist())


# ==================== ESTIMATION ====================


def sufficient_stats(xs: Union[SampleSet, Iterable[float]]) -> SufficientStats:
    values = list(xs.values) if isinstance(xs, SampleSet) else [float(v) for v in xs]
    if not values:
        raise DomainError("cannot compute sufficient statistics of an empty sample")
    if any(not (v > 0) for v in values):
        raise DomainError("all observations must be strictly positive")
    # fsum is exactly rounded, so q2 does not depend on the order of the sample.
    return SufficientStats(
        n=len(values),
        q1=min(values),
        q2=math.fsum(math.log(v) for v in values),
    )


def mle(s: SufficientStats) -> ParetoParams:
    if s.is_degenerate:
        raise DegenerateSampleError(
            "degenerate sample: all observations equal, beta MLE is undefined"
        )
    return ParetoParams(alpha=s.q1, beta=s.n / s.spread)


def mle_beta_given_alpha(s: SufficientStats, alpha: float) -> float:
    if not (alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if alpha > s.q1:
        raise AlphaExceedsMinimumError(alpha, s.q1)
    rate = s.q2 - s.n * math.log(alpha)
    if rate <= 0:
        raise DegenerateSampleError("degenerate sample: q2 - n log alpha is not positive")
    return s.n / rate


def log_likelihood_sample(s: SufficientStats, p: ParetoParams) -> float:
    if p.alpha > s.q1:
        return -math.inf
    return s.n * math.log(p.beta) + s.n * p.beta * math.log(p.alpha) - (p.beta + 1.0) * s.q2


# ==================== INFORMATION MATRICES ====================


def fisher_information(p: ParetoParams) -> np.ndarray:
    """Expected outer product of the score, diag(beta^2/alpha^2, 1/beta^2)."""
    return np.array([[p.beta**2 / p.alpha**2, 0.0], [0.0, 1.0 / p.beta**2]])


def negative_hessian_form(p: ParetoParams) -> np.ndarray:
    """Minus the Hessian of the log-likelihood in (alpha, beta).

    This is NOT the Fisher-Rao metric: the support of the family depends on
    alpha, so the information identity E[-Hessian] = E[score score^T] fails.
    The matrix is singular at beta = 1 and indefinite for beta > 1.
    """
    return np.array(
        [
            [p.beta / p.alpha**2, -1.0 / p.alpha],
            [-1.0 / p.alpha, 1.0 / p.beta**2],
        ]
    )

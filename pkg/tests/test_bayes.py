import math

import numpy as np
from pytest import approx, mark, raises

from shared.errors import AlphaExceedsMinimumError, DegenerateSampleError
from shared.models import GammaPosterior, ParetoParams, SufficientStats
from src import bayes, geometry, model
from src.numerics import gamma_cdf, quad_adaptive, quad_semi_infinite

# (estimator, conditioning, alpha, beta, distance) from the published estimator table.
TABLE = [
    ("mle", "none", 1.0303, 1.1271, 0.1238),
    ("posterior_median", "none", 1.0240, 1.1234, 0.1190),
    ("posterior_mean", "none", 1.0211, 1.1271, 0.1217),
    ("mle", "known_alpha", 1.0, 1.0905, 0.0866),
    ("posterior_median", "known_alpha", 1.0, 1.0977, 0.0932),
    ("posterior_mean", "known_alpha", 1.0, 1.1014, 0.0965),
    ("mle", "known_beta", 1.0303, 1.0, 0.0298),
    ("posterior_median", "known_beta", 1.0232, 1.0, 0.0229),
    ("posterior_mean", "known_beta", 1.0201, 1.0, 0.0199),
]


def _random_points(stats, count, seed):
    generator = model.make_generator(seed)
    alphas = generator.uniform(0.95, stats.q1, count)
    betas = generator.uniform(0.8, 1.5, count)
    return zip(alphas.tolist(), betas.tolist())


# --- prior and joint ---

def test_jeffreys_prior():
    assert bayes.jeffreys_prior_unnorm(ParetoParams(alpha=1.0, beta=7.0)) == 1.0
    p = ParetoParams(alpha=2.0, beta=0.3)
    assert bayes.jeffreys_prior_unnorm(p) == 0.5
    assert bayes.jeffreys_prior_unnorm(p) == geometry.volume_density(p)


def test_joint_is_zero_above_minimum(fixture_stats):
    assert bayes.joint_posterior_pdf(ParetoParams(alpha=1.05, beta=1.0), fixture_stats) == 0.0


def test_joint_rejects_degenerate_stats():
    stats = SufficientStats(n=3, q1=2.0, q2=3 * math.log(2.0))
    with raises(DegenerateSampleError):
        bayes.joint_posterior_pdf(ParetoParams(alpha=1.0, beta=1.0), stats)


def test_joint_factorizes(fixture_stats):
    marginal_beta = bayes.marginal_beta_posterior(fixture_stats)
    for alpha, beta in _random_points(fixture_stats, 20, 7):
        joint = bayes.joint_posterior_pdf(ParetoParams(alpha=alpha, beta=beta), fixture_stats)
        via_alpha = bayes.marginal_alpha_pdf(alpha, fixture_stats) * bayes.gamma_pdf(
            beta, bayes.conditional_beta_posterior(fixture_stats, alpha)
        )
        via_beta = bayes.gamma_pdf(beta, marginal_beta) * bayes.conditional_alpha_pdf(alpha, fixture_stats, beta)
        assert via_alpha == approx(joint, rel=1e-10)
        assert via_beta == approx(joint, rel=1e-10)


# --- marginal of alpha ---

def test_marginal_alpha_at_minimum(fixture_stats):
    s = fixture_stats
    assert bayes.marginal_alpha_pdf(s.q1, s) == approx(s.n**2 / (s.q1 * s.spread), rel=1e-12)
    assert bayes.marginal_alpha_pdf(1.1, s) == 0.0
    assert bayes.marginal_alpha_pdf(0.0, s) == 0.0


def test_marginal_alpha_cdf_edges(fixture_stats):
    assert bayes.marginal_alpha_cdf(fixture_stats.q1, fixture_stats) == 1.0
    assert bayes.marginal_alpha_cdf(2.0, fixture_stats) == 1.0
    assert bayes.marginal_alpha_cdf(0.0, fixture_stats) == 0.0
    assert bayes.marginal_alpha_cdf(-1.0, fixture_stats) == 0.0


def test_alpha_below_point_nine_is_negligible(fixture_stats):
    value = bayes.marginal_alpha_cdf(0.9, fixture_stats)
    assert value < 1e-6
    assert value == approx(6.92e-7, rel=1e-2)


@mark.parametrize("t", [0.8, 0.95, 1.0, 1.02])
def test_marginal_alpha_cdf_forms_agree(fixture_stats, t):
    s = fixture_stats
    ratio_form = (s.spread / (s.q2 - s.n * math.log(t))) ** s.n
    assert bayes.marginal_alpha_cdf(t, s) == approx(ratio_form, rel=1e-10)


def test_marginal_alpha_cdf_derivative_is_pdf(fixture_stats):
    h = 1e-6
    slope = (bayes.marginal_alpha_cdf(1.0 + h, fixture_stats) - bayes.marginal_alpha_cdf(1.0 - h, fixture_stats)) / (2 * h)
    assert slope == approx(bayes.marginal_alpha_pdf(1.0, fixture_stats), abs=1e-6)


@mark.parametrize("prob", [1e-14, 1e-6, 0.1, 0.5, 0.9, 1.0])
def test_marginal_alpha_quantile_inverts_cdf(fixture_stats, prob):
    t = bayes.marginal_alpha_quantile(prob, fixture_stats)
    assert bayes.marginal_alpha_cdf(t, fixture_stats) == approx(prob, rel=1e-9)


def test_posterior_median_alpha(fixture_stats):
    median = bayes.posterior_median_alpha(fixture_stats)
    assert median == approx(1.0240, abs=5e-4)
    assert median == approx(bayes.marginal_alpha_quantile(0.5, fixture_stats), rel=1e-14)
    assert bayes.marginal_alpha_cdf(median, fixture_stats) == approx(0.5, abs=1e-10)


def test_posterior_mean_alpha_within_bounds(fixture_stats):
    lo, hi = bayes.posterior_mean_alpha_bounds(fixture_stats)
    mean = bayes.posterior_mean_alpha(fixture_stats)
    assert lo == approx(1.021066, abs=1e-6)
    assert hi == approx(1.021239, abs=1e-6)
    assert lo <= mean <= hi
    assert mean == approx(1.0211, abs=5e-4)


@mark.parametrize("n", [5, 20, 100])
def test_posterior_mean_bounds_on_random_samples(n):
    for seed in range(7):
        truth = ParetoParams(alpha=0.5 + seed * 0.3, beta=0.5 + 0.25 * seed)
        stats = model.sufficient_stats(model.sample(truth, 1000 + seed, n))
        lo, hi = bayes.posterior_mean_alpha_bounds(stats)
        mean = bayes.posterior_mean_alpha(stats)
        assert lo - 1e-9 <= mean <= hi + 1e-9


def test_mean_bounds_for_a_single_observation():
    lo, hi = bayes.posterior_mean_alpha_bounds(SufficientStats(n=1, q1=2.0, q2=1.0))
    assert lo == -math.inf
    assert hi < 2.0


# --- marginal of beta ---

def test_marginal_beta_posterior(fixture_stats):
    g = bayes.marginal_beta_posterior(fixture_stats)
    assert g.shape == 100
    assert g.rate == approx(88.7232, abs=1e-4)
    assert bayes.gamma_mean(g) == approx(1.1271, abs=5e-4)
    assert bayes.marginal_beta_posterior(SufficientStats(n=1, q1=1.0, q2=1.0)) == GammaPosterior(shape=1, rate=1)


def test_gamma_pdf_integrates_to_one(fixture_stats):
    g = bayes.marginal_beta_posterior(fixture_stats)
    assert quad_semi_infinite(lambda b: bayes.gamma_pdf(b, g), 0.0).value == approx(1.0, abs=1e-8)


def test_posterior_median_beta(fixture_stats):
    median = bayes.posterior_median_beta(fixture_stats)
    assert median == approx(1.1234, abs=5e-4)
    assert gamma_cdf(median, 100, fixture_stats.spread) == approx(0.5, abs=1e-10)


@mark.parametrize("rate", [0.5, 1.0, 3.0])
def test_exponential_median(rate):
    assert bayes.gamma_median(GammaPosterior(shape=1, rate=rate)) == approx(math.log(2.0) / rate, abs=1e-10)


def test_beta_draws_match_posterior_mean(fixture_stats):
    g = bayes.marginal_beta_posterior(fixture_stats)
    draws = bayes.sample_beta_posterior(fixture_stats, 42, 100_000)
    standard_error = math.sqrt(g.variance / draws.size)
    assert abs(draws.mean() - g.mean) < 3 * standard_error
    assert np.array_equal(draws, bayes.sample_beta_posterior(fixture_stats, 42, 100_000))


def test_gamma_posterior_is_close_to_normal(fixture_stats):
    gap = bayes.normal_approximation_gap(fixture_stats)
    assert 0.0 < gap < 0.02


# --- conditionals ---

def test_conditional_beta_posterior(fixture_stats):
    g = bayes.conditional_beta_posterior(fixture_stats, 1.0)
    assert g.shape == 101
    assert g.rate == approx(91.7082)
    with raises(AlphaExceedsMinimumError):
        bayes.conditional_beta_posterior(fixture_stats, 1.1)


def test_conditional_alpha(fixture_stats):
    assert bayes.conditional_alpha_pdf(1.1, fixture_stats, 1.0) == 0.0
    assert bayes.conditional_alpha_cdf(fixture_stats.q1, fixture_stats, 1.0) == 1.0
    median = bayes.posterior_median_alpha_given_beta(fixture_stats, 1.0)
    assert median == approx(1.0232, abs=5e-4)
    assert bayes.conditional_alpha_cdf(median, fixture_stats, 1.0) == approx(0.5, abs=1e-10)
    assert bayes.posterior_mean_alpha_given_beta(fixture_stats, 1.0) == approx(100 / 101 * 1.0303)


# --- predictives ---

def test_predictive_continuous_at_cusp(fixture_stats):
    q1 = fixture_stats.q1
    right = bayes.predictive_pdf(q1, fixture_stats)
    left = bayes.predictive_pdf(math.nextafter(q1, 0.0), fixture_stats)
    assert left == approx(right, rel=1e-10)


def test_predictive_unbounded_near_zero(fixture_stats):
    # d log p / d log x = -1 + n(n+1)/(q2 - n log x) turns negative only
    # below log x = (q2 - n(n+1))/n, about -100 for the fixture.
    s = fixture_stats
    turning = math.exp((s.q2 - s.n * (s.n + 1)) / s.n)
    assert 1e-50 < turning < 1e-40
    assert bayes.predictive_pdf(1e-8, s) < bayes.predictive_pdf(1e-4, s)
    assert bayes.predictive_pdf(1e-200, s) > bayes.predictive_pdf(1e-100, s) > bayes.predictive_pdf(1e-50, s)
    assert bayes.predictive_pdf(0.0, s) == 0.0


def test_predictive_cdf(fixture_stats):
    s = fixture_stats
    assert bayes.predictive_cdf(s.q1, s) == approx(1.0 / 101.0)
    assert bayes.predictive_cdf(1e300, s) == approx(1.0, abs=1e-6)
    h = 1e-7
    for x in (0.99, 1.5, 3.0):
        slope = (bayes.predictive_cdf(x + h, s) - bayes.predictive_cdf(x - h, s)) / (2 * h)
        assert slope == approx(bayes.predictive_pdf(x, s), rel=1e-5)


def test_predictive_given_alpha(fixture_stats):
    s = fixture_stats
    assert bayes.predictive_pdf_given_alpha(0.99, s, 1.0) == 0.0
    expected = 101 / (1.0 * (s.q2 - s.n * math.log(1.0)))
    assert bayes.predictive_pdf_given_alpha(1.0, s, 1.0) == approx(expected, rel=1e-12)
    with raises(AlphaExceedsMinimumError):
        bayes.predictive_pdf_given_alpha(2.0, s, 1.1)


def test_predictive_given_beta(fixture_stats):
    s = fixture_stats
    at_cusp = 100 / 101 * 1.0 / s.q1
    assert bayes.predictive_pdf_given_beta(s.q1, s, 1.0) == approx(at_cusp, rel=1e-12)
    assert bayes.predictive_pdf_given_beta(math.nextafter(s.q1, 0.0), s, 1.0) == approx(at_cusp, rel=1e-10)


def test_predictive_given_beta_single_observation():
    s = SufficientStats(n=1, q1=1.0, q2=0.0)
    assert bayes.predictive_pdf_given_beta(0.5, s, 1.0) == approx(0.5)
    assert bayes.predictive_pdf_given_beta(2.0, s, 1.0) == approx(0.125)


# --- normalization ---

def test_every_density_normalizes(fixture_stats):
    results = bayes.normalization_integrals(fixture_stats, alpha=1.0, beta=1.0)
    assert set(results) == {
        "joint",
        "marginal_alpha",
        "marginal_beta",
        "conditional_alpha",
        "conditional_beta",
        "predictive",
        "predictive_given_alpha",
        "predictive_given_beta",
    }
    for name, result in results.items():
        assert result.value == approx(1.0, abs=1e-6), name


# --- estimator table ---

def test_table_has_nine_rows(fixture_stats, reference):
    rows = bayes.table2_summary(fixture_stats, reference)
    assert [(r.estimator_kind, r.conditioning) for r in rows] == [row[:2] for row in TABLE]


@mark.parametrize("index", range(len(TABLE)))
def test_table_values(fixture_stats, reference, index):
    row = bayes.table2_summary(fixture_stats, reference)[index]
    _, _, alpha, beta, distance = TABLE[index]
    assert row.alpha_hat == approx(alpha, abs=5e-4)
    assert row.beta_hat == approx(beta, abs=5e-4)
    assert row.distance_to_reference == approx(distance, abs=5e-4)
    assert row.distance_to_reference == approx(geometry.distance(reference, row.params), abs=1e-15)


def test_mle_row_distance_is_tight(fixture_stats, reference):
    row = bayes.posterior_rows(fixture_stats, "none", None, reference)[0]
    assert row.distance_to_reference == approx(0.1238, abs=5e-5)


def test_known_alpha_rows_need_a_value(fixture_stats, reference):
    with raises(ValueError):
        bayes.posterior_rows(fixture_stats, "known_alpha", None, reference)


def test_table_skips_known_alpha_above_minimum(reference):
    stats = SufficientStats(n=3, q1=0.5, q2=math.log(0.5) + math.log(0.7) + math.log(2.0))
    rows = bayes.table2_summary(stats, reference)
    assert [r.conditioning for r in rows] == ["none"] * 3 + ["known_beta"] * 3


def test_posterior_mean_alpha_concentrates_for_large_n():
    n = 10_000
    q1 = 1.0001
    stats = SufficientStats(n=n, q1=q1, q2=n * math.log(q1) + n)
    mean = bayes.posterior_mean_alpha(stats)
    lo, hi = bayes.posterior_mean_alpha_bounds(stats)
    assert mean == approx(1.0, abs=2e-4)
    assert lo - 1e-9 <= mean <= hi + 1e-9


@mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_posterior_mean_alpha_given_beta_matches_quadrature(fixture_stats, beta):
    s = fixture_stats
    area = quad_adaptive(lambda a: a * bayes.conditional_alpha_pdf(a, s, beta), 0.0, s.q1, 1e-12, min_panels=16)
    assert bayes.posterior_mean_alpha_given_beta(s, beta) == approx(area.value, abs=1e-9)

import math

import numpy as np
from hypothesis import given, settings
from hypothesis.strategies import floats, integers, lists
from pytest import approx, mark, raises

from shared.errors import BracketError, DomainError, ToleranceNotMetError, TrajectoryLeftDomainError
from src.numerics import (
    QuadratureResult,
    bisect_root,
    finite_diff_jacobian,
    gamma_cdf,
    log_gamma,
    quad_adaptive,
    quad_semi_infinite,
    rk4_integrate,
)


# --- quadrature ---

def test_quad_polynomial():
    result = quad_adaptive(lambda x: x * x, 0.0, 1.0)
    assert result.value == approx(1.0 / 3.0, abs=1e-12)
    assert result.abs_error_estimate <= 1e-10
    assert result.evaluations >= 15


def test_quad_endpoint_singularity():
    # 1/sqrt(x) is never evaluated at 0 by the open rule.
    result = quad_adaptive(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, 1e-8)
    assert result.value == approx(2.0, abs=1e-6)


def test_quad_semi_infinite_exponential():
    assert quad_semi_infinite(lambda x: math.exp(-x), 0.0).value == approx(1.0, abs=1e-10)


def test_quad_semi_infinite_heavy_tail():
    # int_1^inf x^-3 dx = 1/2
    assert quad_semi_infinite(lambda x: x**-3, 1.0).value == approx(0.5, abs=1e-9)


def test_quad_rejects_empty_interval():
    with raises(DomainError):
        quad_adaptive(lambda x: x, 1.0, 1.0)


def test_quad_reports_unmet_tolerance():
    with raises(ToleranceNotMetError) as info:
        quad_adaptive(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, 1e-14, max_panels=5)
    assert info.value.estimate == approx(2.0, abs=0.2)
    assert info.value.error_estimate > 1e-14


@settings(deadline=None, max_examples=30)
@given(integers(min_value=0, max_value=12), floats(min_value=0.1, max_value=5.0))
def test_quad_monomials(k, b):
    result = quad_adaptive(lambda x: x**k, 0.0, b)
    assert result.value == approx(b ** (k + 1) / (k + 1), rel=1e-10, abs=1e-10)


_coefficients = lists(floats(min_value=-5.0, max_value=5.0), min_size=1, max_size=6)


def _polynomial(coefficients):
    return lambda x: sum(c * x**k for k, c in enumerate(coefficients))


@settings(deadline=None, max_examples=30)
@given(_coefficients, _coefficients)
def test_quad_is_linear(f_coefficients, g_coefficients):
    f, g = _polynomial(f_coefficients), _polynomial(g_coefficients)
    tol = 1e-10
    whole = quad_adaptive(lambda x: f(x) + g(x), -1.0, 2.0, tol)
    parts = quad_adaptive(f, -1.0, 2.0, tol).value + quad_adaptive(g, -1.0, 2.0, tol).value
    assert whole.value == approx(parts, abs=3 * tol + 1e-12 * abs(parts))


def test_quadrature_results_add():
    total = QuadratureResult(0.25, 1e-12, 15) + QuadratureResult(0.75, 2e-12, 30)
    assert total.value == 1.0
    assert total.abs_error_estimate == approx(3e-12)
    assert total.evaluations == 45


# --- ODE ---

def test_rk4_exponential_growth():
    trajectory = rk4_integrate(lambda t, y: y, [1.0], 1.0, 100)
    assert trajectory.final_state[0] == approx(math.e, abs=1e-8)
    assert len(trajectory.times) == 101
    assert trajectory.times[-1] == approx(1.0)


def test_rk4_error_drops_sixteenfold_when_step_halves():
    coarse = abs(rk4_integrate(lambda t, y: y, [1.0], 1.0, 10).final_state[0] - math.e)
    fine = abs(rk4_integrate(lambda t, y: y, [1.0], 1.0, 20).final_state[0] - math.e)
    assert 14.0 < coarse / fine < 17.0


def test_rk4_zero_horizon_is_single_point():
    trajectory = rk4_integrate(lambda t, y: y, [2.0, 3.0], 0.0, 10)
    assert trajectory.states.shape == (1, 2)
    assert list(trajectory.final_state) == [2.0, 3.0]


def test_rk4_rejects_backward_horizon():
    with raises(DomainError):
        rk4_integrate(lambda t, y: y, [1.0], -1.0, 10)


def test_rk4_stops_on_non_finite_state():
    def field(t, y):
        return np.array([math.nan]) if t > 0.5 else y

    with raises(TrajectoryLeftDomainError) as info:
        rk4_integrate(field, [1.0], 1.0, 10)
    assert info.value.time <= 0.6
    assert math.isfinite(info.value.last_state[0])


# --- roots ---

def test_bisect_sqrt2():
    assert bisect_root(lambda x: x * x - 2.0, 0.0, 2.0) == approx(math.sqrt(2.0), abs=1e-12)


def test_bisect_accepts_reversed_bracket():
    assert bisect_root(lambda x: x - 0.25, 1.0, 0.0) == approx(0.25, abs=1e-12)


@settings(deadline=None, max_examples=50)
@given(floats(min_value=-3.0, max_value=3.0), floats(min_value=1e-9, max_value=1e-3))
def test_bisect_final_bracket_holds_a_sign_change(root, tol):
    evaluated = {}

    def f(x):
        evaluated[x] = (x - root) ** 3 + 0.1 * (x - root)
        return evaluated[x]

    r = bisect_root(f, -4.0, 4.0, tol)
    if evaluated.get(r) == 0.0:
        return
    left = max(x for x in evaluated if x < r)
    right = min(x for x in evaluated if x > r)
    assert right - left <= tol
    assert math.copysign(1.0, evaluated[left]) != math.copysign(1.0, evaluated[right])


def test_bisect_requires_sign_change():
    with raises(BracketError):
        bisect_root(lambda x: x * x - 2.0, 2.0, 3.0)


# --- special functions ---

@mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 10.0, 100.0, 101.0, 1234.5])
def test_log_gamma_matches_lgamma(x):
    assert log_gamma(x) == approx(math.lgamma(x), rel=1e-12, abs=1e-13)


def test_log_gamma_known_values():
    assert log_gamma(1.0) == approx(0.0, abs=1e-14)
    assert log_gamma(0.5) == approx(0.5 * math.log(math.pi), abs=1e-13)


@mark.parametrize("x", [0.0, -1.0])
def test_log_gamma_domain(x):
    with raises(DomainError):
        log_gamma(x)


@mark.parametrize("x", [0.01, 0.5, 1.0, 3.0, 20.0])
def test_gamma_cdf_exponential(x):
    assert gamma_cdf(x, 1.0, 2.0) == approx(-math.expm1(-2.0 * x), abs=1e-13)


@mark.parametrize("z", [0.5, 2.5, 4.0, 9.0])
def test_gamma_cdf_integer_shape(z):
    expected = 1.0 - math.exp(-z) * (1.0 + z + z * z / 2.0)
    assert gamma_cdf(z, 3.0, 1.0) == approx(expected, rel=1e-12, abs=1e-14)


def test_gamma_cdf_limits():
    assert gamma_cdf(0.0, 5.0, 1.0) == 0.0
    assert gamma_cdf(-3.0, 5.0, 1.0) == 0.0
    assert gamma_cdf(math.inf, 5.0, 1.0) == 1.0
    with raises(DomainError):
        gamma_cdf(1.0, 0.0, 1.0)


def test_gamma_cdf_at_the_mean():
    # For shape k, P(X <= mean) is about 1/2 + 1/(3 sqrt(2 pi k)).
    assert gamma_cdf(100 / 88.7233, 100, 88.7233) == approx(0.5133, abs=1e-4)


@mark.parametrize("shape, rate", [(1.0, 1.0), (3.0, 0.5), (100.0, 88.7233), (101.0, 91.7082)])
def test_gamma_cdf_is_monotone_and_saturates(shape, rate):
    xs = np.linspace(0.0, 5.0 * shape / rate, 400)
    values = [gamma_cdf(float(x), shape, rate) for x in xs]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert gamma_cdf(shape / rate * 50.0, shape, rate) > 1.0 - 1e-12


# --- finite differences ---

def test_jacobian_shape_and_values():
    def f(v):
        return np.array([v[0] ** 2 * v[1], math.sin(v[0])])

    jac = finite_diff_jacobian(f, [1.0, 2.0])
    assert jac.shape == (2, 2)
    np.testing.assert_allclose(jac, [[4.0, 1.0], [math.cos(1.0), 0.0]], atol=1e-8)


def test_jacobian_of_scalar_function_is_one_row():
    jac = finite_diff_jacobian(lambda v: v[0] * v[1], [3.0, 5.0])
    assert jac.shape == (1, 2)
    np.testing.assert_allclose(jac[0], [5.0, 3.0], atol=1e-8)

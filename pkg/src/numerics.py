"""
Numerical kernels shared by the geometry and Bayesian modules:
adaptive Gauss-Kronrod quadrature, fixed-step RK4, bisection,
log-gamma and the regularized incomplete gamma function, and
central-difference Jacobians.

The quadrature kernel follows the QUADPACK QK15 rule (7-point Gauss
embedded in 15-point Kronrod) with global adaptive bisection; the
incomplete gamma function uses the series / continued-fraction split
at shape + 1.
"""
import heapq
import logging
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

import config
from shared.errors import (
    BracketError,
    DomainError,
    ToleranceNotMetError,
    TrajectoryLeftDomainError,
)

logger = logging.getLogger("paretogeo.numerics")

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min
_FPMIN = 1e-300

MAX_PANEL_DEPTH = 60
MAX_PANELS = 2000

# Kronrod abscissae; odd indices are the Gauss nodes.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.abs_error_estimate < 0 or self.evaluations < 1:
            raise ValueError("invalid quadrature result")

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
        )


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have the same length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


# ==================== QUADRATURE ====================


def _qk15(f: Callable[[float], float], a: float, b: float):
    """One QK15 panel: (integral, error estimate)."""
    centr = 0.5 * (a + b)
    hlgth = 0.5 * (b - a)
    dhlgth = abs(hlgth)

    fc = f(centr)
    resg = fc * _WG[3]
    resk = fc * _WGK[7]
    resabs = abs(resk)
    fv1 = [0.0] * 7
    fv2 = [0.0] * 7
    for j in range(7):
        absc = hlgth * _XGK[j]
        fval1 = f(centr - absc)
        fval2 = f(centr + absc)
        fv1[j] = fval1
        fv2[j] = fval2
        fsum = fval1 + fval2
        resk += _WGK[j] * fsum
        resabs += _WGK[j] * (abs(fval1) + abs(fval2))
        if j % 2 == 1:
            resg += _WG[j // 2] * fsum

    if not math.isfinite(resk):
        raise DomainError(f"integrand is not finite on panel [{a!r}, {b!r}]")

    reskh = resk * 0.5
    resasc = _WGK[7] * abs(fc - reskh)
    for j in range(7):
        resasc += _WGK[j] * (abs(fv1[j] - reskh) + abs(fv2[j] - reskh))

    result = resk * hlgth
    resabs *= dhlgth
    resasc *= dhlgth
    abserr = abs((resk - resg) * hlgth)
    if resasc != 0.0 and abserr != 0.0:
        abserr = resasc * min(1.0, (200.0 * abserr / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        abserr = max(50.0 * _EPS * resabs, abserr)
    return result, abserr


def quad_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = config.QUAD_TOLERANCE,
    *,
    min_panels: int = 1,
    max_panels: int = MAX_PANELS,
    max_depth: int = MAX_PANEL_DEPTH,
) -> QuadratureResult:
    """Integrates f over (a, b) by globally adaptive bisection of QK15 panels.

    The rule never evaluates the endpoints, so integrable endpoint
    singularities are allowed. Converges when the summed error estimate is
    below max(tol, 50 eps |value|); raises ToleranceNotMetError otherwise.
    """
    if not (a < b):
        raise DomainError(f"quadrature needs a < b, got a={a!r}, b={b!r}")
    if tol <= 0:
        raise DomainError("quadrature tolerance must be positive")

    heap = []  # (-error, left, right, value, error, depth)
    settled_value = 0.0
    settled_error = 0.0
    width = (b - a) / min_panels
    for i in range(min_panels):
        left = a + i * width
        right = b if i == min_panels - 1 else a + (i + 1) * width
        value, error = _qk15(f, left, right)
        heapq.heappush(heap, (-error, left, right, value, error, 0))
    panels = min_panels

    while True:
        total = settled_value + math.fsum(item[3] for item in heap)
        total_error = settled_error + math.fsum(item[4] for item in heap)
        if total_error <= max(tol, 50.0 * _EPS * abs(total)):
            logger.debug(f"quad_adaptive converged: {panels} panels, error {total_error:.3e}")
            return QuadratureResult(total, total_error, 15 * panels)
        if not heap or panels >= max_panels:
            raise ToleranceNotMetError("quadrature tolerance not met", total, total_error)

        _, left, right, value, error, depth = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if depth >= max_depth or not (left < mid < right):
            # Panel cannot be refined further; keep its contribution.
            settled_value += value
            settled_error += error
            continue
        for lo, hi in ((left, mid), (mid, right)):
            sub_value, sub_error = _qk15(f, lo, hi)
            heapq.heappush(heap, (-sub_error, lo, hi, sub_value, sub_error, depth + 1))
        panels += 2


def quad_semi_infinite(
    f: Callable[[float], float],
    a: float,
    tol: float = config.QUAD_TOLERANCE,
    *,
    min_panels: int = 8,
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """Integrates f over (a, inf) through u = a + t / (1 - t), t in (0, 1)."""

    def mapped(t: float) -> float:
        one_minus = 1.0 - t
        value = f(a + t / one_minus)
        if value == 0.0:
            return 0.0
        return value / (one_minus * one_minus)

    return quad_adaptive(mapped, 0.0, 1.0, tol, min_panels=min_panels, max_panels=max_panels)


# ==================== ODE ====================


def rk4_integrate(
    field: Callable[[float, np.ndarray], np.ndarray],
    y0: Union[Sequence[float], np.ndarray],
    t_end: float,
    steps: int,
) -> OdeTrajectory:
    """Classical fixed-step RK4 for y' = field(t, y) from t = 0 to t_end."""
    if steps < 1:
        raise DomainError("rk4_integrate needs at least one step")
    if t_end < 0:
        raise DomainError("rk4_integrate integrates forward; t_end must be >= 0")

    y = np.array(y0, dtype=float)
    if t_end == 0:
        return OdeTrajectory(np.zeros(1), y[np.newaxis, :].copy())

    h = t_end / steps
    times = np.linspace(0.0, t_end, steps + 1)
    states = np.empty((steps + 1,) + y.shape, dtype=float)
    states[0] = y
    for i in range(steps):
        t = times[i]
        k1 = field(t, y)
        k2 = field(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = field(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = field(t + h, y + h * k3)
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise TrajectoryLeftDomainError(float(t), y.tolist())
        y = y_next
        states[i + 1] = y
    return OdeTrajectory(times, states)


# ==================== ROOTS ====================


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = config.ROOT_TOLERANCE,
    max_iter: int = 400,
) -> float:
    """Bisection on a sign-changing bracket; returns the midpoint of the final bracket."""
    if lo > hi:
        lo, hi = hi, lo
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(f"bracket invalid: f({lo!r})={f_lo!r}, f({hi!r})={f_hi!r}")

    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


# ==================== SPECIAL FUNCTIONS ====================


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0 (Lanczos, reflection below 1/2)."""
    if not (x > 0):
        raise DomainError(f"log_gamma is defined for x > 0, got {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def _gamma_series(a: float, z: float, gln: float, max_iter: int) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(max_iter):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-z + a * math.log(z) - gln)
    raise ToleranceNotMetError("incomplete gamma series did not converge", total, abs(term))


def _gamma_continued_fraction(a: float, z: float, gln: float, max_iter: int) -> float:
    b = z + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-z + a * math.log(z) - gln) * h
    raise ToleranceNotMetError("incomplete gamma continued fraction did not converge", h, abs(delta - 1.0))


def gamma_cdf(x: float, shape: float, rate: float, max_iter: int = 10000) -> float:
    """Regularized lower incomplete gamma P(shape, rate * x)."""
    if not (shape > 0) or not (rate > 0):
        raise DomainError(f"gamma_cdf needs shape > 0 and rate > 0, got {shape!r}, {rate!r}")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    z = rate * x
    gln = log_gamma(shape)
    if z < shape + 1.0:
        value = _gamma_series(shape, z, gln, max_iter)
    else:
        value = 1.0 - _gamma_continued_fraction(shape, z, gln, max_iter)
    return min(1.0, max(0.0, value))


# ==================== FINITE DIFFERENCES ====================


def finite_diff_jacobian(
    f: Callable[[np.ndarray], Union[float, Sequence[float], np.ndarray]],
    at: Union[Sequence[float], np.ndarray],
    h: float = config.FD_STEP,
) -> np.ndarray:
    """Central-difference Jacobian, shape (outputs, inputs); scalar f gives one row.

    The step along coordinate j is h * max(1, |at_j|): relative to the
    coordinate when |at_j| >= 1 and absolute (h) below that, so it never
    shrinks toward zero near the origin.
    """
    x0 = np.array(at, dtype=float)
    columns = []
    for j in range(x0.size):
        step = h * max(1.0, abs(x0[j]))
        forward = x0.copy()
        backward = x0.copy()
        forward[j] += step
        backward[j] -= step
        f_plus = np.atleast_1d(np.asarray(f(forward), dtype=float))
        f_minus = np.atleast_1d(np.asarray(f(backward), dtype=float))
        columns.append((f_plus - f_minus) / (2.0 * step))
    return np.column_stack(columns)

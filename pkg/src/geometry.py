"""
Riemannian geometry of the Pareto family under the Fisher-Rao metric

    ds^2 = (beta^2 / alpha^2) dalpha^2 + (1 / beta^2) dbeta^2.

F(alpha, beta) = (log alpha, 1/beta) is an isometry onto the Poincare upper
half-plane, so geodesics, distances and curvature (K = -1) come from
hyperbolic geometry. The numerical checks here (pullback metric, Levi-Civita
symbols, Gaussian curvature, RK4 geodesics) verify that correspondence
independently of the closed forms.
"""
import logging
import math
from typing import List

import numpy as np

import config
from shared.errors import DomainError, TrajectoryLeftDomainError
from shared.models import (
    BallPoint,
    ChristoffelTable,
    GeodesicState,
    HalfPlanePoint,
    MetricTensor,
    ParetoParams,
)
from src.numerics import OdeTrajectory, finite_diff_jacobian, rk4_integrate

logger = logging.getLogger("paretogeo.geometry")

# Below this argument offset arcosh(1 + s) switches to its series.
_ARCOSH_SERIES_CUTOFF = 1e-8


# ==================== METRIC & CONNECTION ====================


def _metric_components(alpha: float, beta: float):
    return beta * beta / (alpha * alpha), 1.0 / (beta * beta)


def fisher_metric(p: ParetoParams) -> MetricTensor:
    g11, g22 = _metric_components(p.alpha, p.beta)
    return MetricTensor(g11=g11, g12=0.0, g22=g22)


def _christoffel_array(alpha: float, beta: float) -> np.ndarray:
    table = np.zeros((2, 2, 2))
    table[0, 0, 0] = -1.0 / alpha
    table[0, 0, 1] = table[0, 1, 0] = 1.0 / beta
    table[1, 0, 0] = -(beta**3) / (alpha * alpha)
    table[1, 1, 1] = -1.0 / beta
    return table


def christoffel(p: ParetoParams) -> ChristoffelTable:
    return ChristoffelTable.from_array(_christoffel_array(p.alpha, p.beta))


def christoffel_levi_civita(p: ParetoParams, h: float = config.FD_STEP) -> ChristoffelTable:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij) with finite-difference d."""

    def flat_metric(theta: np.ndarray) -> np.ndarray:
        g11, g22 = _metric_components(theta[0], theta[1])
        return np.array([g11, 0.0, 0.0, g22])

    # dg[i, j, l] = d_l g_ij
    dg = finite_diff_jacobian(flat_metric, p.as_array(), h).reshape(2, 2, 2)
    g_inv = np.linalg.inv(fisher_metric(p).as_matrix())
    table = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(i, 2):
                value = 0.0
                for l in range(2):
                    value += 0.5 * g_inv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                table[k, i, j] = table[k, j, i] = value
    return ChristoffelTable.from_array(table)


def volume_density(p: ParetoParams) -> float:
    """Riemannian volume density sqrt(det g) = 1/alpha."""
    return 1.0 / p.alpha


def curvature_estimate(p: ParetoParams, h: float = config.FD_STEP) -> float:
    """Gaussian curvature from finite differences of the metric.

    For an orthogonal metric E du^2 + G dv^2,
    K = -1/(2 sqrt(EG)) [d_u(G_u / sqrt(EG)) + d_v(E_v / sqrt(EG))].
    """

    def area(theta: np.ndarray) -> float:
        g11, g22 = _metric_components(theta[0], theta[1])
        return math.sqrt(g11 * g22)

    def g11_at(theta: np.ndarray) -> float:
        return _metric_components(theta[0], theta[1])[0]

    def g22_at(theta: np.ndarray) -> float:
        return _metric_components(theta[0], theta[1])[1]

    def a_term(theta: np.ndarray) -> float:
        return finite_diff_jacobian(g22_at, theta, h)[0, 0] / area(theta)

    def b_term(theta: np.ndarray) -> float:
        return finite_diff_jacobian(g11_at, theta, h)[0, 1] / area(theta)

    point = p.as_array()
    d_a = finite_diff_jacobian(a_term, point, h)[0, 0]
    d_b = finite_diff_jacobian(b_term, point, h)[0, 1]
    return -(d_a + d_b) / (2.0 * area(point))


# ==================== HALF-PLANE ISOMETRY ====================


def to_half_plane(p: ParetoParams) -> HalfPlanePoint:
    return HalfPlanePoint(x=math.log(p.alpha), y=1.0 / p.beta)


def from_half_plane(q: HalfPlanePoint) -> ParetoParams:
    return ParetoParams(alpha=math.exp(q.x), beta=1.0 / q.y)


def half_plane_metric(q: HalfPlanePoint) -> MetricTensor:
    scale = 1.0 / (q.y * q.y)
    return MetricTensor(g11=scale, g12=0.0, g22=scale)


def pullback_metric_check(p: ParetoParams, h: float = config.FD_STEP) -> float:
    """Max entrywise |J^T H J - g| for J the finite-difference Jacobian of F."""
    jacobian = finite_diff_jacobian(
        lambda theta: np.array([math.log(theta[0]), 1.0 / theta[1]]), p.as_array(), h
    )
    h_matrix = half_plane_metric(to_half_plane(p)).as_matrix()
    pulled_back = jacobian.T @ h_matrix @ jacobian
    return float(np.max(np.abs(pulled_back - fisher_metric(p).as_matrix())))


# ==================== GEODESICS ====================


def _geodesic_denominator(theta0: float, t: float) -> float:
    half = math.pi / 4.0 - theta0 / 2.0
    return math.exp(t) * math.sin(half) ** 2 + math.exp(-t) * math.cos(half) ** 2


def geodesic_half_plane(gs: GeodesicState) -> HalfPlanePoint:
    """Unit-speed hyperbolic geodesic from F(start) at angle theta0 to the x-axis."""
    q0 = to_half_plane(gs.start)
    y = q0.y / _geodesic_denominator(gs.theta0, gs.t)
    x = q0.x + y * math.sinh(gs.t) * math.cos(gs.theta0)
    return HalfPlanePoint(x=x, y=y)


def geodesic_closed_form(gs: GeodesicState) -> ParetoParams:
    beta_t = gs.start.beta * _geodesic_denominator(gs.theta0, gs.t)
    alpha_t = gs.start.alpha * math.exp(math.sinh(gs.t) * math.cos(gs.theta0) / beta_t)
    return ParetoParams(alpha=alpha_t, beta=beta_t)


def initial_velocity(gs: GeodesicState) -> np.ndarray:
    """(alpha', beta') at t = 0: the half-plane vector y0 (cos theta0, sin theta0) pulled back by F."""
    return np.array(
        [
            gs.start.alpha * math.cos(gs.theta0) / gs.start.beta,
            -gs.start.beta * math.sin(gs.theta0),
        ]
    )


def speed(p: ParetoParams, velocity) -> float:
    g11, g22 = _metric_components(p.alpha, p.beta)
    return math.sqrt(g11 * velocity[0] ** 2 + g22 * velocity[1] ** 2)


def geodesic_field(t: float, state: np.ndarray) -> np.ndarray:
    """First-order form of x''^k = -Gamma^k_ij x'^i x'^j on (alpha, beta, alpha', beta')."""
    position = state[:2]
    velocity = state[2:]
    table = _christoffel_array(position[0], position[1])
    acceleration = -np.einsum("kij,i,j->k", table, velocity, velocity)
    return np.concatenate([velocity, acceleration])


def geodesic_trajectory(gs: GeodesicState, steps: int) -> OdeTrajectory:
    theta0, t_end = gs.theta0, gs.t
    if t_end < 0:
        # Running backwards is running forwards in the opposite direction.
        theta0, t_end = theta0 + math.pi, -t_end
    start = GeodesicState(start=gs.start, theta0=theta0, t=t_end)
    velocity = initial_velocity(start)
    logger.debug(f"RK4 geodesic from ({gs.start.alpha}, {gs.start.beta}), theta0={theta0:.6f}, t={t_end}")
    y0 = np.array([gs.start.alpha, gs.start.beta, velocity[0], velocity[1]])
    return rk4_integrate(geodesic_field, y0, t_end, steps)


def geodesic_ode(gs: GeodesicState, steps: int) -> ParetoParams:
    trajectory = geodesic_trajectory(gs, steps)
    final = trajectory.final_state
    if final[0] <= 0 or final[1] <= 0:
        raise TrajectoryLeftDomainError(float(trajectory.times[-1]), final.tolist())
    return ParetoParams(alpha=float(final[0]), beta=float(final[1]))


def geodesic_ball(
    center: ParetoParams, radius: float, n_rays: int, n_steps: int
) -> List[List[BallPoint]]:
    """Radial geodesics at theta0 = 2 pi k / n_rays, each sampled on t in [0, radius]."""
    if not (radius > 0):
        raise DomainError(f"radius must be positive, got {radius!r}")
    if n_rays < 1:
        raise DomainError("geodesic ball needs at least one ray")
    if n_steps < 2:
        raise DomainError("each ray needs at least two points")

    rays = []
    for k in range(n_rays):
        theta0 = 2.0 * math.pi * k / n_rays
        polyline = []
        for t in np.linspace(0.0, radius, n_steps):
            state = GeodesicState(start=center, theta0=theta0, t=float(t))
            p = geodesic_closed_form(state)
            q = to_half_plane(p)
            polyline.append(
                BallPoint(ray_index=k, t=float(t), alpha=p.alpha, beta=p.beta, x=q.x, y=q.y)
            )
        rays.append(polyline)
    logger.info(f"Built geodesic ball: {n_rays} rays x {n_steps} points, radius {radius}")
    return rays


# ==================== DISTANCES ====================


def _arcosh_1p(s: float) -> float:
    """arcosh(1 + s) for s >= 0, accurate for nearby points."""
    if s < _ARCOSH_SERIES_CUTOFF:
        return math.sqrt(2.0 * s) * (1.0 - s / 12.0)
    return math.log1p(s + math.sqrt(s * (s + 2.0)))


def distance(p0: ParetoParams, p1: ParetoParams) -> float:
    """Fisher-Rao geodesic distance between two Pareto densities."""
    log_ratio = math.log(p0.alpha) - math.log(p1.alpha)
    beta_product = p0.beta * p1.beta
    beta_gap = p0.beta - p1.beta
    s = 0.5 * beta_product * log_ratio * log_ratio + beta_gap * beta_gap / (2.0 * beta_product)
    return _arcosh_1p(s)


def half_plane_distance(q0: HalfPlanePoint, q1: HalfPlanePoint) -> float:
    dx = q0.x - q1.x
    dy = q0.y - q1.y
    return _arcosh_1p((dx * dx + dy * dy) / (2.0 * q0.y * q1.y))

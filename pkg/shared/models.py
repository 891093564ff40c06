import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Slack for q2 >= n log q1 when every observation is equal and the log sum rounds low.
_SPREAD_SLACK = 1e-9

# --- Points on the manifold ---

class ParetoParams(BaseModel):
    """A point (alpha, beta) of the two-parameter Pareto family.

    alpha is the scale (lower support bound), beta the shape (tail index).
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    alpha: float = Field(gt=0)
    beta: float = Field(gt=0)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=float)

    @classmethod
    def parse(cls, text: str) -> "ParetoParams":
        """Builds params from an "a,b" string (the CLI --reference form)."""
        parts = [item.strip() for item in text.split(",") if item.strip()]
        if len(parts) != 2:
            raise ValueError(f"expected 'alpha,beta', got {text!r}")
        return cls(alpha=float(parts[0]), beta=float(parts[1]))


class HalfPlanePoint(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    x: float
    y: float = Field(gt=0)


# --- Data ---

class SampleSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: List[float] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def _all_positive(cls, values: List[float]) -> List[float]:
        for index, value in enumerate(values):
            if not (value > 0) or math.isinf(value):
                raise ValueError(f"value #{index + 1} is not a positive finite real: {value!r}")
        return values

    def __len__(self) -> int:
        return len(self.values)


class SufficientStats(BaseModel):
    """(n, q1 = min x, q2 = sum log x); the posterior depends on data only through these."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    n: int = Field(ge=1)
    q1: float = Field(gt=0)
    q2: float

    @model_validator(mode="after")
    def _log_sum_bound(self) -> "SufficientStats":
        floor = self.n * math.log(self.q1)
        if self.q2 < floor - _SPREAD_SLACK * max(1.0, abs(floor)):
            raise ValueError(
                f"q2={self.q2!r} is below n*log(q1)={floor!r}; no sample has these statistics"
            )
        return self

    @property
    def log_q1(self) -> float:
        return math.log(self.q1)

    @property
    def spread(self) -> float:
        """q2 - n log q1, the rate of the marginal Gamma posterior of beta."""
        return self.q2 - self.n * math.log(self.q1)

    @property
    def is_degenerate(self) -> bool:
        return self.spread <= _SPREAD_SLACK * max(1.0, abs(self.q2))


# --- Geometry ---

class MetricTensor(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    g11: float = Field(gt=0)
    g12: float = 0.0
    g22: float = Field(gt=0)

    @model_validator(mode="after")
    def _positive_definite(self) -> "MetricTensor":
        if self.g11 * self.g22 - self.g12 * self.g12 <= 0:
            raise ValueError("metric tensor is not positive definite")
        return self

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]], dtype=float)

    def determinant(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12


class ChristoffelTable(BaseModel):
    """Connection coefficients; field kK_IJ holds Gamma^K_{IJ} (1-based)."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    k1_11: float
    k1_12: float
    k1_21: float
    k1_22: float
    k2_11: float
    k2_12: float
    k2_21: float
    k2_22: float

    @model_validator(mode="after")
    def _lower_symmetric(self) -> "ChristoffelTable":
        if self.k1_12 != self.k1_21 or self.k2_12 != self.k2_21:
            raise ValueError("Christoffel symbols must be symmetric in the lower indices")
        return self

    def symbol(self, k: int, i: int, j: int) -> float:
        return getattr(self, f"k{k}_{i}{j}")

    def as_array(self) -> np.ndarray:
        """Array indexed [k, i, j] (0-based)."""
        table = np.empty((2, 2, 2), dtype=float)
        for k in (1, 2):
            for i in (1, 2):
                for j in (1, 2):
                    table[k - 1, i - 1, j - 1] = self.symbol(k, i, j)
        return table

    @classmethod
    def from_array(cls, table: np.ndarray) -> "ChristoffelTable":
        values = {
            f"k{k}_{i}{j}": float(table[k - 1, i - 1, j - 1])
            for k in (1, 2)
            for i in (1, 2)
            for j in (1, 2)
        }
        return cls(**values)


class GeodesicState(BaseModel):
    """Unit-speed geodesic from `start`; theta0 is measured in half-plane coordinates."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    start: ParetoParams
    theta0: float = 0.0
    t: float = 0.0

    @field_validator("theta0")
    @classmethod
    def _wrap_angle(cls, theta: float) -> float:
        wrapped = math.remainder(theta, 2.0 * math.pi)
        if wrapped <= -math.pi:
            wrapped += 2.0 * math.pi
        return wrapped


class BallPoint(BaseModel):
    """A vertex of a geodesic-ball ray, in both coordinate systems."""

    model_config = ConfigDict(frozen=True)

    ray_index: int = Field(ge=0)
    t: float
    alpha: float
    beta: float
    x: float
    y: float


BALL_CSV_COLUMNS: Tuple[str, ...] = ("ray_index", "t", "alpha", "beta", "x", "y")


# --- Bayesian summaries ---

class GammaPosterior(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    shape: float = Field(gt=0)
    rate: float = Field(gt=0)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / (self.rate * self.rate)


EstimatorKind = Literal["mle", "posterior_median", "posterior_mean"]
Conditioning = Literal["none", "known_alpha", "known_beta"]


class PosteriorSummary(BaseModel):
    """One estimator row; serialized as estimator, conditioning, alpha, beta, distance."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    estimator_kind: EstimatorKind = Field(alias="estimator")
    conditioning: Conditioning
    alpha_hat: float = Field(alias="alpha", gt=0)
    beta_hat: float = Field(alias="beta", gt=0)
    distance_to_reference: float = Field(alias="distance", ge=0)

    @property
    def params(self) -> ParetoParams:
        return ParetoParams(alpha=self.alpha_hat, beta=self.beta_hat)


class FitReport(BaseModel):
    """Top-level object written by `fit` and `simulate`."""

    model_config = ConfigDict(frozen=True)

    stats: SufficientStats
    mle: ParetoParams
    reference: ParetoParams
    known_alpha: Optional[float] = None
    known_beta: Optional[float] = None
    rows: List[PosteriorSummary]


CSV_SUMMARY_COLUMNS: Tuple[str, ...] = ("estimator", "conditioning", "alpha", "beta", "distance")

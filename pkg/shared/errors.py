from typing import Any, Optional, Sequence


class ParetoGeoError(Exception):
    """Base class for every error raised by the library."""


class ToleranceNotMetError(ParetoGeoError, RuntimeError):
    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(
            f"{message} (estimate={estimate!r}, error estimate={error_estimate!r})"
        )
        self.estimate = estimate
        self.error_estimate = error_estimate


class TrajectoryLeftDomainError(ParetoGeoError, RuntimeError):
    def __init__(self, time: float, last_state: Sequence[float]):
        super().__init__(
            f"Trajectory left domain after t={time!r}; last valid state {list(last_state)!r}"
        )
        self.time = time
        self.last_state = last_state


class BracketError(ParetoGeoError, ValueError):
    pass


class DomainError(ParetoGeoError, ValueError):
    pass


class DegenerateSampleError(ParetoGeoError, ValueError):
    pass


class AlphaExceedsMinimumError(ParetoGeoError, ValueError):
    def __init__(self, alpha: float, q1: float):
        super().__init__(
            f"alpha exceeds minimum observation: alpha={alpha!r} > q1={q1!r}"
        )
        self.alpha = alpha
        self.q1 = q1


class SampleFileError(ParetoGeoError, ValueError):
    def __init__(self, message: str, path: Any = None, line_number: Optional[int] = None):
        where = f"{path}" if path is not None else "<input>"
        if line_number is not None:
            where = f"{where}:{line_number}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line_number = line_number

import logging
from dataclasses import dataclass
from typing import Optional

import config
from shared.models import ParetoParams

logger = logging.getLogger("cli.config")


@dataclass
class RunConfig:
    """Settings for one command run; defaults come from config.py / the environment."""

    seed: int = config.DEFAULT_SEED
    input_path: Optional[str] = None
    output_format: str = config.OUTPUT_FORMAT
    tolerance: float = config.QUAD_TOLERANCE
    precision: int = config.PRECISION
    reference: str = config.REFERENCE

    def __post_init__(self):
        self.output_format = self.output_format.lower()
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"output format must be json or csv, got {self.output_format!r}")
        if not (self.tolerance > 0):
            raise ValueError(f"tolerance must be positive, got {self.tolerance!r}")
        if not (0 <= self.precision <= 15):
            raise ValueError(f"precision must be between 0 and 15, got {self.precision!r}")
        # Fail early on a malformed reference rather than after the numerics.
        self.reference_params = ParetoParams.parse(self.reference)

        logger.debug(
            f"Run config: seed={self.seed}, format={self.output_format}, tol={self.tolerance}, "
            f"precision={self.precision}, reference=({self.reference_params.alpha}, {self.reference_params.beta})"
        )

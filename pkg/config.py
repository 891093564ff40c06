import logging
import os
from dotenv import load_dotenv
load_dotenv()


def _float_env(name, default):
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        logging.warning(f"Invalid {name} '{raw}'. Using default {default}.")
        return default


def _int_env(name, default):
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        logging.warning(f"Invalid {name} '{raw}'. Using default {default}.")
        return default


# Numerical tolerances (absolute)
QUAD_TOLERANCE = _float_env("PARETOGEO_TOLERANCE", 1e-10)
ROOT_TOLERANCE = _float_env("PARETOGEO_ROOT_TOLERANCE", 1e-12)
# Relative finite-difference step for Jacobians, Christoffel and curvature checks
FD_STEP = _float_env("PARETOGEO_FD_STEP", 1e-5)

# Sampling
DEFAULT_SEED = _int_env("PARETOGEO_SEED", 42)

# Output settings
OUTPUT_FORMAT = os.getenv("PARETOGEO_OUTPUT_FORMAT", "json").lower()
if OUTPUT_FORMAT not in ("json", "csv"):
    logging.warning(f"Invalid PARETOGEO_OUTPUT_FORMAT '{OUTPUT_FORMAT}'. Using json.")
    OUTPUT_FORMAT = "json"
PRECISION = _int_env("PARETOGEO_PRECISION", 6)

# Reference parameters (alpha0, beta0) that distances are measured against
REFERENCE = os.getenv("PARETOGEO_REFERENCE", "1,1")

LOG_LEVEL = os.getenv("PARETOGEO_LOG_LEVEL", "INFO").upper()

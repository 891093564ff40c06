import logging
import sys


def setup_logging(level="INFO"):
    """Configures basic logging for the application.

    Logs go to stderr; stdout is reserved for command results.
    """
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s - %(levelname)s - [%(module)s:%(lineno)d] - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def format_real(value, precision):
    """Fixed-point rendering used for every printed number."""
    return f"{value:.{precision}f}"


def round_real(value, precision):
    return float(format_real(value, precision))

import logging
import sys

# --- Setup Logging FIRST ---
try:
    import config
    from src import utils

    utils.setup_logging(config.LOG_LEVEL)
except ImportError:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s", stream=sys.stderr
    )
    logging.warning("Could not import src.utils. Using basic logging.")

# --- Import other components AFTER logging is set up ---
try:
    from cli.main_cli import main
except ImportError as e:
    logging.exception(f"Failed to import necessary modules: {e}")
    logging.error(
        "Please ensure all files exist (config.py, src/*, shared/*, cli/*) and required packages are installed (requirements.txt)."
    )
    sys.exit(1)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logging.info("Interrupted by user (Ctrl+C).")
        sys.exit(130)

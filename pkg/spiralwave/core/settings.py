"""
Settings for the spiralwave toolkit.

Values are read from the environment once at import time, after an optional
.env file has been loaded. Numerical defaults used by the solvers live here as
named constants so that every module agrees on them.
"""

import logging.config
import os
from pathlib import Path

from spiralwave.utils.environment import env_int, load_environment_files

load_environment_files()

BASE_DIR = Path(__file__).resolve().parent.parent

ENVIRONMENT = os.getenv("SPIRALWAVE_ENVIRONMENT", "development")

# Parallelism cap for sweeps, locus samples and spectra
THREADS = env_int("SPIRALWAVE_THREADS", os.cpu_count() or 1)

LOG_LEVEL = os.getenv("SPIRALWAVE_LOG_LEVEL", "INFO").upper()
LOG_DIR = os.getenv("SPIRALWAVE_LOG_DIR", "")

# Sentry is only initialised when a DSN is configured
SENTRY_DSN = os.getenv("SENTRY_DSN", "")

# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------
GRID_RATIO = 0.85
TIP_OFFSET_FACTOR = 1e-6
BULK_INTERVALS = 400
ARC_LENGTH_TOL = 1e-6
REFLECTION_TOL = 1e-10
SURFACE_SAMPLES = 2001

# ---------------------------------------------------------------------------
# Kinetics
# ---------------------------------------------------------------------------
ASSUMPTION_SAMPLES = 256
ASSUMPTION_Y_FACTOR = 4.0
C_BISECTION_XTOL = 1e-12
C_SEARCH_MAX = 1e6

# ---------------------------------------------------------------------------
# Eigensolver
# ---------------------------------------------------------------------------
PRUFER_RTOL = 1e-12
PRUFER_ATOL = 1e-12
EIGEN_RTOL = 1e-10
LAMBDA_CAP = 1e4

# ---------------------------------------------------------------------------
# Newton / continuation
# ---------------------------------------------------------------------------
NEWTON_TOL = 1e-11
NEWTON_MAX_ITER = 25
NEWTON_STAGNATION_TOL = 1e-10
CONTINUATION_STEP = 0.25
CONTINUATION_STEP_MIN = 1e-4
DIVERGENCE_WINDOW = 3

# ---------------------------------------------------------------------------
# Pattern classification
# ---------------------------------------------------------------------------
OMEGA_TOL = 1e-8
P_TOL = 1e-6
AMP_FLOOR_FACTOR = 1e-8
LOCUS_OMEGA_TOL = 1e-10
LOCUS_MAX_ITER = 30

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "spiralwave": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": True,
        },
    },
}

if LOG_DIR:
    logs_dir = Path(LOG_DIR)
    logs_dir.mkdir(parents=True, exist_ok=True)
    LOGGING["handlers"]["file"] = {
        "level": LOG_LEVEL,
        "class": "logging.FileHandler",
        "filename": str(logs_dir / "spiralwave.log"),
        "formatter": "verbose",
    }
    LOGGING["loggers"]["spiralwave"]["handlers"].append("file")


def configure_logging() -> None:
    """Apply the LOGGING dict; called by the command line entry point."""
    logging.config.dictConfig(LOGGING)


def configure_sentry() -> bool:
    """Initialise error reporting when SENTRY_DSN is set."""
    if not SENTRY_DSN:
        return False
    import sentry_sdk

    sentry_sdk.init(
        dsn=SENTRY_DSN,
        environment=ENVIRONMENT,
        traces_sample_rate=0.0,
        send_default_pii=False,
    )
    return True

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# Define path for the environment file
env_path = BASE_DIR.parent / ".env"


def load_environment_files(path: Path = None) -> bool:
    """
    Load environment variables from a .env file.

    Variables already present in the process environment win over the file.

    Returns:
        True if a file was found and loaded
    """
    target = Path(path) if path is not None else env_path
    if target.exists():
        logger.debug(f"Loading environment file: {target}")
        load_dotenv(target, override=False)
        return True
    logger.debug("No .env file found. Using system environment variables.")
    return False


def env_int(name: str, default: int) -> int:
    """Read a positive integer from the environment, falling back to default."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return default
    if value < 1:
        logger.warning(f"Ignoring non-positive {name}={value}")
        return default
    return value

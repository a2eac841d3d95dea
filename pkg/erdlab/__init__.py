import sys
import time
from pathlib import Path

from loguru import logger

__version__ = "0.3.0"


def configure_logging(log_dir: str | Path, level: str = "INFO"):
    """Route loguru output to timestamped files under `log_dir` plus stderr."""
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    filename = time.strftime("%Y-%m-%d_%H-%M-%S")

    logger.remove()
    logger.add(
        log_dir / f"{filename}.log",
        filter=lambda record: record["level"].name not in ["DEBUG", "ERROR", "WARNING"],
    )
    logger.add(
        log_dir / f"{filename}.debug.log",
        filter=lambda record: record["level"].name == "DEBUG",
    )
    logger.add(
        log_dir / f"{filename}.error.log",
        filter=lambda record: record["level"].name == "ERROR"
        or record["level"].name == "WARNING",
    )
    logger.add(
        sys.stderr,
        level=level,
        filter=lambda record: record["level"].name not in ["DEBUG"],
    )
    logger.debug(f"Logging to {log_dir}")

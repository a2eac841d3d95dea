import argparse
import os
import sys
from pathlib import Path

from dotenv import load_dotenv
from loguru import logger

from erdlab import __version__, configure_logging
from erdlab.config import load_config
from erdlab.driver import Driver
from erdlab.errors import ConfigError, ErdlabError
from erdlab.experiments import AbstractExperiment
from erdlab.utils.shards import THREADS_ENV

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_USAGE = 2
LOG_LEVEL_ENV = "ERDLAB_LOG_LEVEL"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erdlab",
        description="Diffusion training lab: Bayes floors, recoverability weighting and NTK spectra on a 2-D mixture.",
    )
    parser.add_argument("--version", action="version", version=f"erdlab {__version__}")
    parser.add_argument(
        "command",
        choices=AbstractExperiment.names() + ["all"],
        help="experiment to run, or `all` for the full report",
    )
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--out", help="output directory (overrides out_dir)")
    parser.add_argument("--seed", type=int, help="master seed (overrides seed)")
    parser.add_argument("--plot", action="store_true", default=None, help="also write SVG plots")
    parser.add_argument(
        "--oracle-only",
        action="store_true",
        help="skip everything that needs a trained model",
    )
    parser.add_argument("--threads", type=int, help=f"thread cap for sharded work (sets {THREADS_ENV})")
    parser.add_argument("--no-progress", action="store_true", help="hide progress bars")
    return parser


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config, out_dir=args.out, seed=args.seed, plot=args.plot)
    except ConfigError as error:
        logger.error(f"Configuration error: {error}")
        return EXIT_USAGE

    if args.threads is not None:
        if args.threads < 1:
            logger.error(f"--threads must be at least 1, got {args.threads}")
            return EXIT_USAGE
        os.environ[THREADS_ENV] = str(args.threads)

    try:
        configure_logging(Path(config.out_dir) / "logs", os.environ.get(LOG_LEVEL_ENV, "INFO"))
        driver = Driver(config, oracle_only=args.oracle_only, progress=not args.no_progress)
        names = () if args.command == "all" else (args.command,)
        driver.run(*names)
    except ConfigError as error:
        logger.error(f"Configuration error: {error}")
        return EXIT_USAGE
    except (ErdlabError, OSError) as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_FAULT

    logger.info(f"erdlab {args.command} finished")
    return EXIT_OK


def run():
    sys.exit(main())

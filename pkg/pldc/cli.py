import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from pldc import config
from pldc.commands import COMMANDS
from pldc.errors import DivergenceError, PLDCError, SolverError

logger = logging.getLogger("pldc")

LOG_FORMAT = "[%(asctime)s] %(levelname)s in %(module)s: %(message)s"
HANDLER_NAMES = ("pldc-file", "pldc-stderr")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3


def configure_logging(level=None, log_dir=None):
    """Rotating file log plus WARNING-and-above on stderr. Calling it again
    replaces the handlers it installed before."""
    level = (level or config.LOG_LEVEL).upper()
    log_dir = log_dir or config.LOG_DIR
    logger.setLevel(level)
    for handler in list(logger.handlers):
        if handler.get_name() in HANDLER_NAMES:
            logger.removeHandler(handler)
            handler.close()

    stderr = logging.StreamHandler(sys.stderr)
    stderr.set_name("pldc-stderr")
    stderr.setLevel(logging.WARNING)
    stderr.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.addHandler(stderr)

    # Production logging (rotating file)
    try:
        os.makedirs(log_dir, exist_ok=True)
        handler = RotatingFileHandler(
            os.path.join(log_dir, "pldc.log"),
            maxBytes=config.LOG_MAX_BYTES,
            backupCount=config.LOG_BACKUP_COUNT,
        )
        handler.set_name("pldc-file")
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    except Exception:
        pass


def create_parser():
    parser = argparse.ArgumentParser(
        prog="pldc",
        description="Piecewise-linear difference-of-convex regression and classification.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Register Commands
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv=None):
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    logger.info(f"Running `{args.command}`")

    try:
        return args.func(args)
    except (SolverError, DivergenceError) as exc:
        logger.error(f"{args.command} failed in the solver: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (PLDCError, ValueError, OSError) as exc:
        logger.error(f"{args.command} rejected its input: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

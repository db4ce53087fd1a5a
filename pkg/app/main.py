import argparse
import logging
from typing import Optional, Sequence

from dotenv import load_dotenv

from app.routers import dsm_routers
from app.utils.error_handling import ConfigurationError, handle_cli_error
from app.utils.logger import logger

# Load environment variables from .env file
load_dotenv()


class CommandParser(argparse.ArgumentParser):
    """Usage errors become ConfigurationError (exit 1); exit 2 is reserved for OOV and coverage failures."""

    def error(self, message: str):
        raise ConfigurationError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(prog="dsm", description="Count-based distributional semantic models")
    subparsers = parser.add_subparsers(dest="command", required=True)
    dsm_routers.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logger.setLevel(logging.DEBUG)
        logger.debug("Running %s", args.command)
        return args.handler(args)
    except Exception as exc:
        return handle_cli_error(exc)

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import AutomGrpError
from app.core.logging_config import setup_logging
from app.commands import COMMANDS

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Groups generated by 3-state automata over a 2-letter alphabet",
    )
    parser.add_argument("--log-level", help=f"root log level (default {settings.log_level})")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Exit codes: 0 success, 1 a check failed, 2 usage or input error"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except (AutomGrpError, ValidationError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        print(f"{parser.prog}: error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

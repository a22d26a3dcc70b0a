# Command line subcommands; each module exposes register(subparsers) and run(args)
from app.commands import check_relator, classify, dot, dual, fixtures, report, spectrum

COMMANDS = (report, classify, spectrum, dot, check_relator, fixtures, dual)

__all__ = ["COMMANDS"]

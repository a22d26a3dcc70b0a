import argparse
import csv

from app.core.config import settings
from app.core.errors import LevelTooDeepError
from app.services.spectra_service import SpectraService
from app.commands.common import add_automaton_arguments, output_stream, resolve_automaton


def register(subparsers) -> None:
    parser = subparsers.add_parser("spectrum", help="spectrum of the averaged level operator")
    add_automaton_arguments(parser)
    parser.add_argument("--level", type=int, default=settings.spectrum_level)
    parser.add_argument("--deep", action="store_true",
                        help=f"allow levels up to {settings.spectrum_max_level}")
    parser.add_argument("--raw", action="store_true", help="eigenvalues instead of the histogram")
    parser.add_argument("--no-symmetrize", action="store_true", help="generators only, without inverses")
    parser.add_argument("--out", help="CSV path (default stdout)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    automaton, _ = resolve_automaton(args)
    limit = settings.spectrum_max_level if args.deep else settings.spectrum_level
    if args.level > limit:
        raise LevelTooDeepError(automaton.d, args.level, automaton.d ** limit)

    result = SpectraService().spectrum(automaton, args.level, symmetrize=not args.no_symmetrize)
    with output_stream(args.out) as handle:
        if args.raw:
            for value in result.eigenvalues:
                handle.write(f"{value:.15g}\n")
        else:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["bin_left", "bin_right", "count"])
            for left, right, count in zip(result.bin_edges, result.bin_edges[1:], result.counts):
                writer.writerow([f"{left:.15g}", f"{right:.15g}", count])
    return 0

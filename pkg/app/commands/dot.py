import argparse

from app.services.dot_service import DotService
from app.commands.common import add_automaton_arguments, output_stream, resolve_automaton

KINDS = ("moore", "schreier", "tile")


def register(subparsers) -> None:
    parser = subparsers.add_parser("dot", help="Graphviz DOT of the Moore diagram or a level graph")
    parser.add_argument("kind", choices=KINDS)
    add_automaton_arguments(parser)
    parser.add_argument("--level", type=int, default=3)
    parser.add_argument("--out", help="DOT path (default stdout)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    automaton, _ = resolve_automaton(args)
    service = DotService()
    if args.kind == "moore":
        source = service.moore_dot(automaton)
    elif args.kind == "schreier":
        source = service.schreier_dot(automaton, args.level)
    else:
        source = service.tile_dot(automaton, args.level)
    with output_stream(args.out) as handle:
        handle.write(source)
    return 0

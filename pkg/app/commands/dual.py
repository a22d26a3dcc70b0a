import argparse

from app.models.automaton import Invertibility, format_recursion
from app.services.mealy_service import MealyService
from app.commands.common import add_automaton_arguments, resolve_automaton


def register(subparsers) -> None:
    parser = subparsers.add_parser("dual", help="wreath recursion of the dual automaton")
    add_automaton_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    automaton, _ = resolve_automaton(args)
    dual = MealyService().dual(automaton)
    if dual == Invertibility.NOT_INVERTIBLE:
        print(dual.value)
    else:
        print(format_recursion(dual, letter_names=[automaton.name(s) for s in range(automaton.m)]))
    return 0

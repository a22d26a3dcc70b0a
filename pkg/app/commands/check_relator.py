import argparse

from app.models.word import parse_word
from app.services.group_service import GroupService
from app.commands.common import add_automaton_arguments, resolve_automaton


def register(subparsers) -> None:
    parser = subparsers.add_parser("check-relator", help="decide whether a word is the identity")
    add_automaton_arguments(parser)
    parser.add_argument("word", help="word such as 'a^2', '(ab)^4' or '[a,b]'")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    automaton, _ = resolve_automaton(args)
    word = parse_word(args.word, automaton)
    if GroupService().verify_relator(automaton, word):
        print(f"{args.word} = 1")
        return 0
    print(f"{args.word} != 1")
    return 1

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, TextIO, Tuple

from app.models.automaton import Automaton, parse_recursion
from app.services.mealy_service import MealyService


def add_automaton_arguments(parser: argparse.ArgumentParser) -> None:
    """Positional automaton number, or an explicit wreath recursion"""
    parser.add_argument("number", nargs="?", type=int, help="automaton number 1..5832")
    parser.add_argument("--recursion", help="wreath recursion such as 'a=σ(1,a)' instead of a number")
    parser.add_argument("--degree", type=int, default=2, help="alphabet size for --recursion")


def resolve_automaton(args: argparse.Namespace) -> Tuple[Automaton, Optional[int]]:
    if args.recursion:
        if args.number is not None:
            raise ValueError("give either an automaton number or --recursion, not both")
        return parse_recursion(args.recursion, d=args.degree), None
    if args.number is None:
        raise ValueError("an automaton number or --recursion is required")
    return MealyService().decode_number(args.number), args.number


@contextmanager
def output_stream(path: Optional[str]) -> Iterator[TextIO]:
    """Open `path` for writing, or hand out stdout when no path is given"""
    if not path:
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        yield handle

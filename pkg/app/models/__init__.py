from .automaton import (
    ActivityKind, Automaton, Invertibility, OrderStatus, SmallGroup, SymmetryOp, Verdict,
    all_symmetry_ops, automaton_count, format_recursion, parse_recursion,
)
from .level_group import LevelGroup
from .series import RationalSeries
from .word import GenWord, format_word, parse_word

__all__ = [
    "ActivityKind", "Automaton", "Invertibility", "OrderStatus", "SmallGroup", "SymmetryOp", "Verdict",
    "all_symmetry_ops", "automaton_count", "format_recursion", "parse_recursion",
    "LevelGroup", "RationalSeries", "GenWord", "format_word", "parse_word",
]

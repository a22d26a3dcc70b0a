"""Group words over automaton states.

Internally a word is a tuple of symbols: symbol s < m is state s and
symbol s + m is its formal inverse. A word acts from the right, so the
word "ab" applies b first.
"""
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.errors import WordSyntaxError
from app.models.automaton import Automaton

Symbols = Tuple[int, ...]


def invert_symbol(symbol: int, m: int) -> int:
    return symbol + m if symbol < m else symbol - m


def free_reduce(symbols: Sequence[int], m: int) -> Symbols:
    stack: List[int] = []
    for symbol in symbols:
        if stack and stack[-1] == invert_symbol(symbol, m):
            stack.pop()
        else:
            stack.append(symbol)
    return tuple(stack)


def inverse_word(symbols: Sequence[int], m: int) -> Symbols:
    return tuple(invert_symbol(s, m) for s in reversed(symbols))


def multiply(left: Sequence[int], right: Sequence[int], m: int) -> Symbols:
    return free_reduce(tuple(left) + tuple(right), m)


def power(symbols: Sequence[int], k: int, m: int) -> Symbols:
    base = tuple(symbols) if k >= 0 else inverse_word(symbols, m)
    return free_reduce(base * abs(k), m)


def cyclically_reduce(symbols: Sequence[int], m: int) -> Symbols:
    word = free_reduce(symbols, m)
    while len(word) >= 2 and word[0] == invert_symbol(word[-1], m):
        word = word[1:-1]
    return word


class GenWord(BaseModel):
    """Freely reduced word over the states of an automaton and their inverses"""
    model_config = ConfigDict(frozen=True)

    automaton: Automaton
    letters: Tuple[Tuple[int, int], ...] = Field(default=(), description="(state, exponent ±1) pairs")

    @model_validator(mode="after")
    def _check_reduced(self) -> "GenWord":
        for state, exponent in self.letters:
            if not 0 <= state < self.automaton.m or exponent not in (1, -1):
                raise ValueError(f"invalid letter ({state}, {exponent})")
        for (s1, e1), (s2, e2) in zip(self.letters, self.letters[1:]):
            if s1 == s2 and e1 == -e2:
                raise ValueError("word is not freely reduced")
        return self

    @classmethod
    def from_symbols(cls, automaton: Automaton, symbols: Sequence[int]) -> "GenWord":
        m = automaton.m
        reduced = free_reduce(symbols, m)
        return cls(automaton=automaton, letters=tuple((s % m, 1 if s < m else -1) for s in reduced))

    @classmethod
    def identity(cls, automaton: Automaton) -> "GenWord":
        return cls(automaton=automaton)

    @property
    def symbols(self) -> Symbols:
        m = self.automaton.m
        return tuple(s if e == 1 else s + m for s, e in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "GenWord") -> "GenWord":
        return GenWord.from_symbols(self.automaton, self.symbols + other.symbols)

    def inverse(self) -> "GenWord":
        return GenWord.from_symbols(self.automaton, inverse_word(self.symbols, self.automaton.m))

    def __str__(self) -> str:
        return format_word(self.symbols, self.automaton)


def format_word(symbols: Sequence[int], automaton: Automaton) -> str:
    """Lowercase names for states, uppercase for inverses, runs as powers"""
    if not symbols:
        return "1"
    m = automaton.m
    out = []
    i = 0
    while i < len(symbols):
        j = i
        while j < len(symbols) and symbols[j] == symbols[i]:
            j += 1
        symbol = symbols[i]
        name = automaton.name(symbol % m)
        name = name if symbol < m else name.upper()
        out.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return "".join(out)


class _WordParser:
    """Recursive-descent parser for the relator notation.

    Grammar: product := factor*; factor := atom ("^" exponent)*;
    atom := letter | "1" | "(" product ")" | "[" product "," product "]";
    exponent := ["-"] digits | "{" (["-"] digits | product) "}".
    """

    def __init__(self, text: str, automaton: Automaton):
        self.text = text.replace("\\cdot", " ").replace("·", " ").replace("*", " ")
        self.original = text
        self.automaton = automaton
        self.m = automaton.m
        self.pos = 0
        self.names = {automaton.name(s): s for s in range(automaton.m)}

    def error(self, message: str):
        raise WordSyntaxError(message, self.original, self.pos)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str):
        if self.peek() != expected:
            self.error(f"expected {expected!r}")
        self.pos += 1

    def parse(self) -> Symbols:
        word = self.product()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return word

    def product(self) -> Symbols:
        word: Symbols = ()
        while self.peek() and self.peek() not in ")],}":
            word = multiply(word, self.factor(), self.m)
        return word

    def factor(self) -> Symbols:
        word = self.atom()
        while self.peek() == "^":
            self.pos += 1
            word = self.exponent(word)
        return word

    def atom(self) -> Symbols:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            word = self.product()
            self.take(")")
            return word
        if ch == "[":
            self.pos += 1
            x = self.product()
            self.take(",")
            y = self.product()
            self.take("]")
            # [x, y] = x^-1 y^-1 x y
            return free_reduce(inverse_word(x, self.m) + inverse_word(y, self.m) + x + y, self.m)
        if ch == "1":
            self.pos += 1
            return ()
        if ch.isalpha():
            self.pos += 1
            if ch in self.names:
                return (self.names[ch],)
            if ch.lower() in self.names:
                return (self.names[ch.lower()] + self.m,)
            self.error(f"unknown generator {ch!r}")
        self.error(f"unexpected {ch!r}" if ch else "unexpected end of word")

    def integer(self) -> int:
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        digits_start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits_start:
            self.pos = start
            self.error("expected an exponent")
        return int(self.text[start:self.pos])

    def exponent(self, base: Symbols) -> Symbols:
        if self.peek() != "{":
            return power(base, self.integer(), self.m)
        self.pos += 1
        save = self.pos
        ch = self.peek()
        if ch == "-" or ch.isdigit():
            k = self.integer()
            if self.peek() == "}":
                self.pos += 1
                return power(base, k, self.m)
            self.pos = save
        conjugator = self.product()
        self.take("}")
        # x^y = y^-1 x y
        return free_reduce(inverse_word(conjugator, self.m) + base + conjugator, self.m)


def parse_symbols(text: str, automaton: Automaton) -> Symbols:
    return _WordParser(text, automaton).parse()


def parse_word(text: str, automaton: Automaton) -> GenWord:
    """Parse the word syntax used on the command line and in fixtures"""
    return GenWord.from_symbols(automaton, parse_symbols(text, automaton))

import itertools
import re
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Perm = Tuple[int, ...]

SIGMA = "σ"
DEFAULT_NAMES = "abcdefghijklmnopqrstuvwxyz"


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class OrderStatus(str, Enum):
    INFINITE = "infinite"
    UNKNOWN = "unknown"


class Invertibility(str, Enum):
    NOT_INVERTIBLE = "not invertible"


class ActivityKind(str, Enum):
    BOUNDED = "bounded"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"


class SmallGroup(str, Enum):
    TRIVIAL = "trivial"
    C2 = "C2"
    KLEIN = "C2xC2"
    Z = "Z"
    D_INFINITY = "D_infinity"
    LAMPLIGHTER = "Lamplighter"


def is_permutation(perm: Sequence[int], d: int) -> bool:
    return len(perm) == d and sorted(perm) == list(range(d))


def inverse_permutation(perm: Sequence[int]) -> Perm:
    inverse = [0] * len(perm)
    for x, y in enumerate(perm):
        inverse[y] = x
    return tuple(inverse)


def cycle_notation(perm: Sequence[int], names: Optional[Sequence[str]] = None) -> str:
    """Cycle notation of a permutation, "1" for the identity"""
    names = names or [str(x) for x in range(len(perm))]
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append("(" + "".join(names[y] for y in cycle) + ")")
    return "".join(cycles) or "1"


class Automaton(BaseModel):
    """Invertible Mealy automaton over a d-letter alphabet.

    State s acts on a word xw by s(xw) = output[s][x] t(w) where
    t = transition[s][x]. Equality and hashing use only the machine
    (d, m, output, transition); labels are display data.
    """
    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=2, description="Alphabet size")
    m: int = Field(ge=1, description="Number of states")
    output: Tuple[Perm, ...] = Field(description="Per-state permutation of the alphabet")
    transition: Tuple[Tuple[int, ...], ...] = Field(description="Per-state, per-letter target state")
    labels: Optional[Tuple[str, ...]] = Field(default=None, description="Optional state names")
    identity_state: Optional[int] = Field(
        default=None, description="State standing for the identity that is not a generator"
    )

    @model_validator(mode="after")
    def _check_machine(self) -> "Automaton":
        if len(self.output) != self.m or len(self.transition) != self.m:
            raise ValueError(f"expected {self.m} output and transition rows")
        for s in range(self.m):
            if not is_permutation(self.output[s], self.d):
                raise ValueError(f"output of state {s} is not a permutation of 0..{self.d - 1}")
            row = self.transition[s]
            if len(row) != self.d or any(not 0 <= t < self.m for t in row):
                raise ValueError(f"transition row of state {s} is invalid: {row}")
        if self.labels is not None and len(self.labels) != self.m:
            raise ValueError("labels must name every state")
        if self.identity_state is not None and not 0 <= self.identity_state < self.m:
            raise ValueError("identity_state is not a state")
        return self

    @property
    def key(self) -> Tuple[int, int, Tuple[Perm, ...], Tuple[Tuple[int, ...], ...]]:
        return (self.d, self.m, self.output, self.transition)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automaton):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def name(self, s: int) -> str:
        if self.labels is not None:
            return self.labels[s]
        return DEFAULT_NAMES[s] if s < len(DEFAULT_NAMES) else f"s{s}"

    def is_active(self, s: int) -> bool:
        return self.output[s] != tuple(range(self.d))

    @property
    def active_states(self) -> List[int]:
        return [s for s in range(self.m) if self.is_active(s)]

    @property
    def generators(self) -> List[int]:
        """States used as the generating set (all but an explicit identity state)"""
        return [s for s in range(self.m) if s != self.identity_state]

    def trivial_states(self) -> List[int]:
        """States acting as the identity: the largest inactive set closed under transitions"""
        trivial = {s for s in range(self.m) if not self.is_active(s)}
        changed = True
        while changed:
            changed = False
            for s in list(trivial):
                if any(t not in trivial for t in self.transition[s]):
                    trivial.discard(s)
                    changed = True
        return sorted(trivial)


class SymmetryOp(BaseModel):
    """Generator inversion combined with a renaming of states and letters.

    Applying the op sends state s to state_perm[s] and letter x to
    letter_perm[x]; inversion commutes with both renamings.
    """
    model_config = ConfigDict(frozen=True)

    invert: bool = False
    state_perm: Perm
    letter_perm: Perm

    def compose(self, other: "SymmetryOp") -> "SymmetryOp":
        """The op applying `other` first, then `self`"""
        return SymmetryOp(
            invert=self.invert != other.invert,
            state_perm=tuple(self.state_perm[s] for s in other.state_perm),
            letter_perm=tuple(self.letter_perm[x] for x in other.letter_perm),
        )


def all_symmetry_ops(m: int, d: int) -> Iterator[SymmetryOp]:
    for invert in (False, True):
        for state_perm in itertools.permutations(range(m)):
            for letter_perm in itertools.permutations(range(d)):
                yield SymmetryOp(invert=invert, state_perm=state_perm, letter_perm=letter_perm)


def automaton_count(m: int, d: int) -> int:
    """Number of invertible (m, d)-automata: m^(m*d) * (d!)^m"""
    factorial = 1
    for k in range(2, d + 1):
        factorial *= k
    return m ** (m * d) * factorial ** m


def format_recursion(
    automaton: Automaton,
    state_names: Optional[Sequence[str]] = None,
    letter_names: Optional[Sequence[str]] = None,
) -> str:
    """Wreath recursion text such as ``a=σ(b,a), b=(a,a), c=(a,a)``.

    Binary automata write the swap as σ; larger alphabets use cycle notation
    over the letter names. An identity_state is rendered as 1 and not listed.
    """
    names = [
        "1" if s == automaton.identity_state else
        (state_names[s] if state_names else automaton.name(s))
        for s in range(automaton.m)
    ]
    parts = []
    for s in automaton.generators:
        perm = automaton.output[s]
        if not automaton.is_active(s):
            prefix = ""
        elif automaton.d == 2:
            prefix = SIGMA
        else:
            prefix = cycle_notation(perm, letter_names)
        sections = ",".join(names[t] for t in automaton.transition[s])
        parts.append(f"{names[s]}={prefix}({sections})")
    return ", ".join(parts)


_STATE_RE = re.compile(
    r"\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*(σ|s|\\sigma|(?:\([0-9]+\))+)?\s*\(([^()]*)\)\s*"
)


def parse_recursion(text: str, d: int = 2) -> Automaton:
    """Parse a wreath recursion such as ``a=σ(1,a)`` or ``a=s(b,c), b=(a,b)``.

    ``1`` in a section position adds an identity state that is not a
    generator. For d > 2 the permutation is given in cycle notation over
    letter digits, e.g. ``a=(012)(b,a,a)``.
    """
    chunks = [c for c in re.split(r"[,;]\s*(?=[A-Za-z][A-Za-z0-9_]*\s*=)", text.strip()) if c.strip()]
    if not chunks:
        raise ValueError("empty wreath recursion")
    parsed = []
    for chunk in chunks:
        match = _STATE_RE.fullmatch(chunk)
        if not match:
            raise ValueError(f"cannot parse state definition {chunk!r}")
        name, perm_text, sections = match.groups()
        targets = [t.strip() for t in sections.split(",")]
        if len(targets) != d:
            raise ValueError(f"state {name} needs {d} sections, got {len(targets)}")
        parsed.append((name, perm_text, targets))

    names = [name for name, _, _ in parsed]
    if len(set(names)) != len(names):
        raise ValueError("state names must be distinct")
    uses_identity = any(t == "1" for _, _, targets in parsed for t in targets)
    index = {name: i for i, name in enumerate(names)}
    identity_state = None
    if uses_identity:
        identity_state = len(names)
        index["1"] = identity_state

    output, transition = [], []
    for name, perm_text, targets in parsed:
        output.append(_parse_perm(perm_text, d))
        try:
            transition.append(tuple(index[t] for t in targets))
        except KeyError as e:
            raise ValueError(f"unknown state {e.args[0]!r} in definition of {name}") from None
    labels = list(names)
    if uses_identity:
        output.append(tuple(range(d)))
        transition.append((identity_state,) * d)
        labels.append("1")
    return Automaton(
        d=d, m=len(output), output=tuple(output), transition=tuple(transition),
        labels=tuple(labels), identity_state=identity_state,
    )


def _parse_perm(text: Optional[str], d: int) -> Perm:
    if not text:
        return tuple(range(d))
    if text in (SIGMA, "s", "\\sigma"):
        if d != 2:
            raise ValueError("σ is only meaningful over a binary alphabet")
        return (1, 0)
    perm = list(range(d))
    for cycle in re.findall(r"\(([0-9]+)\)", text):
        letters = [int(ch) for ch in cycle]
        if any(x >= d for x in letters) or len(set(letters)) != len(letters):
            raise ValueError(f"invalid cycle ({cycle})")
        for i, x in enumerate(letters):
            perm[x] = letters[(i + 1) % len(letters)]
    return tuple(perm)

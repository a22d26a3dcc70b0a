from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

AutomatonNumber = Annotated[int, Field(ge=1, le=5832)]


class FixtureStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class Headline(BaseModel):
    section: str
    class_count: int
    small_class_count: int
    isomorphism_class_bound: int
    finite_group_count: int
    abelian_group_count: int


class FiniteOrder(BaseModel):
    number: AutomatonNumber
    order: int = Field(ge=1)
    group: str
    section: str


class EquivalenceRange(BaseModel):
    first: AutomatonNumber
    last: AutomatonNumber
    representative: AutomatonNumber
    section: str


class GroupEntry(BaseModel):
    """Transcribed data of one automaton"""
    number: AutomatonNumber
    section: str
    recursion: str
    group: Optional[str] = None
    contracting: Literal["yes", "no", "n/a"]
    self_replicating: Literal["yes", "no", "n/a"]
    relators: List[str] = Field(default_factory=list)
    sf: List[int] = Field(default_factory=list, description="log2 of |G/Stab(n)| from level 0")
    gr: List[int] = Field(default_factory=list, description="Growth prefix from radius 0")


class FixtureSet(BaseModel):
    version: int
    headline: Headline
    finite_orders: List[FiniteOrder]
    equivalence_ranges: List[EquivalenceRange]
    equivalence_section: str
    equivalence: List[Tuple[int, int, int]] = Field(description="(number, class representative, isomorphism annotation)")
    entries: List[GroupEntry]

    @model_validator(mode="after")
    def _check_numbers(self) -> "FixtureSet":
        for row in self.equivalence:
            if any(not 1 <= value <= 5832 for value in row):
                raise ValueError(f"equivalence row {list(row)} has a number outside 1..5832")
        return self

    def class_map(self) -> Dict[int, int]:
        """Expected representative for every transcribed number"""
        mapping = {}
        for span in self.equivalence_ranges:
            for n in range(span.first, span.last + 1):
                mapping[n] = span.representative
        for number, representative, _ in self.equivalence:
            mapping[number] = representative
        return mapping

    def isomorphism_map(self) -> Dict[int, int]:
        return {number: iso for number, _, iso in self.equivalence}

    def entry(self, number: int) -> Optional[GroupEntry]:
        return next((e for e in self.entries if e.number == number), None)


class FixtureVerdict(BaseModel):
    fact: str
    status: FixtureStatus
    section: str
    expected: Optional[str] = None
    computed: Optional[str] = None

    def line(self) -> str:
        text = f"{self.status.value} {self.fact}"
        if self.status == FixtureStatus.FAIL:
            text += f" (expected {self.expected}, computed {self.computed})"
        return text

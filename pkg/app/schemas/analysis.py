from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from app.models.automaton import ActivityKind, Verdict


class CertificateReason(str, Enum):
    LEVEL_TRANSITIVE = "level_transitive"
    NONTORSION_PARITY = "nontorsion_parity"
    SELF_SIMILAR_POWER = "self_similar_power"


class OrderCertificate(BaseModel):
    """Proof that an element has infinite order: (w^power)|vertex = section"""
    word: str
    power: int = Field(ge=1)
    vertex: str
    section: str
    reason: CertificateReason


class NotFreeWitness(BaseModel):
    """Nontrivial elements of the forms (1, u) and (v, 1)"""
    first: str
    first_section: str = Field(description="u in first = (1, u)")
    second: str
    second_section: str = Field(description="v in second = (v, 1)")


class GrowthRecord(BaseModel):
    radius: int = Field(ge=0)
    counts: List[int] = Field(description="gamma(0..radius)")


class StructuralFlags(BaseModel):
    has_trivial_state: bool
    open_set_condition: bool
    strongly_connected: bool
    dual_invertible: bool
    fully_invertible: bool


class ClassTable(BaseModel):
    class_rep: Dict[int, int] = Field(description="Automaton number -> least number of its class")
    reduced_state_count: Dict[int, int] = Field(description="Class representative -> minimized state count")
    small_group: Dict[int, str] = Field(default_factory=dict, description="Representative -> catalog group")

    @property
    def representatives(self) -> List[int]:
        return sorted(self.reduced_state_count)


class NoncontractionWitness(BaseModel):
    word: str
    vertex: str
    certificate: OrderCertificate


class Nucleus(BaseModel):
    """Least section-closed set holding every deep enough section of every element"""
    elements: List[str] = Field(description="Elements on cycles of the section graph and all their sections")
    closure: List[str] = Field(description="Section closure of the nucleus together with the generators and their inverses")
    size: int
    closure_size: int
    depth: int = Field(description="Deepest level needed for a product to land")


class ContractionResult(BaseModel):
    status: Verdict
    nucleus: Optional[Nucleus] = None
    witness: Optional[NoncontractionWitness] = None
    candidates: List[Tuple[str, str]] = Field(
        default_factory=list, description="Self-similar words without an infinite-order certificate"
    )


class ActivityClass(BaseModel):
    state: str
    kind: ActivityKind
    degree: Optional[int] = Field(default=None, description="Polynomial degree; 0 when bounded")
    counts: List[int] = Field(description="f_s(n) for n = 0..12")
    sample_agrees: bool = Field(default=True, description="Whether the sampled counts fit the class")


class SchreierArc(BaseModel):
    source: str
    label: str
    target: str


class SchreierLevelGraph(BaseModel):
    level: int
    vertices: List[str]
    arcs: List[SchreierArc]


class SpectrumResult(BaseModel):
    eigenvalues: List[float]
    bin_edges: List[float]
    counts: List[int]
    residual: float
    sweeps: int


class SelfReplicatingResult(BaseModel):
    status: Verdict
    projected_generators: List[str] = Field(default_factory=list)
    separating_level: Optional[int] = None

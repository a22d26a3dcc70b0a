from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.core.config import settings
from app.models.automaton import Verdict
from app.schemas.analysis import (
    ActivityClass, ClassTable, ContractionResult, GrowthRecord, StructuralFlags,
)


class Budgets(BaseModel):
    """Per-call search budgets; defaults come from the settings"""
    sf_level: int = Field(ge=0)
    growth_radius: int = Field(ge=0)
    relator_radius: int = Field(ge=1)
    enumeration_cap: int = Field(ge=1)
    finite_check_cap: int = Field(ge=1)
    transitivity_depth: int = Field(ge=1)
    self_replicating_radius: int = Field(ge=1)
    self_replicating_depth: int = Field(ge=1)
    spectrum_level: Optional[int] = Field(default=None, ge=0)
    include_contraction: bool = True

    @classmethod
    def from_settings(cls, **overrides) -> "Budgets":
        values = dict(
            sf_level=settings.sf_level,
            growth_radius=settings.growth_radius,
            relator_radius=settings.relator_radius,
            enumeration_cap=settings.enumeration_cap,
            finite_check_cap=settings.finite_check_cap,
            transitivity_depth=settings.transitivity_depth,
            self_replicating_radius=settings.self_replicating_radius,
            self_replicating_depth=settings.self_replicating_depth,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class SpectrumSummary(BaseModel):
    level: int
    symmetrized: bool = True
    bin_edges: List[float]
    counts: List[int]


class AnalysisReport(BaseModel):
    """Everything known about one automaton within the budgets"""
    number: Optional[int] = None
    recursion: str
    class_representative: Optional[int] = None
    reduced_states: int
    small_group: Optional[str] = None
    isomorphic_to: Optional[int] = Field(default=None, description="Transcribed isomorphism annotation, not verified")
    sf_exponents: List[int]
    growth: GrowthRecord
    relators: List[str]
    finite_order: Optional[int] = None
    level_transitive: Verdict
    contraction: Optional[ContractionResult] = None
    self_replicating: Verdict
    activity: List[ActivityClass]
    bounded: bool
    flags: StructuralFlags
    dual: str
    spectrum: Optional[SpectrumSummary] = None


class RangeSummary(BaseModel):
    first: int
    last: int
    representative: Optional[int] = Field(description="Shared representative, None when the range splits")


class ClassificationSummary(BaseModel):
    class_count: int
    small_class_count: int
    finite_orders: Dict[int, int] = Field(description="Representative -> group order, for finite groups")
    ranges: List[RangeSummary]
    table: ClassTable

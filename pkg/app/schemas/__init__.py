from .analysis import (
    ActivityClass, CertificateReason, ClassTable, ContractionResult, GrowthRecord,
    NoncontractionWitness, NotFreeWitness, Nucleus, OrderCertificate, SchreierArc,
    SchreierLevelGraph, SelfReplicatingResult, SpectrumResult, StructuralFlags,
)
from .fixtures import FixtureSet, FixtureStatus, FixtureVerdict, GroupEntry
from .report import AnalysisReport, Budgets, ClassificationSummary, RangeSummary, SpectrumSummary

import logging
from pathlib import Path
from typing import Callable, List, Optional, Union

from app.core.config import settings
from app.core.errors import AutomGrpError, WordSyntaxError
from app.core.logging_config import metrics_logger
from app.models.automaton import (
    ActivityKind, Automaton, Invertibility, OrderStatus, Verdict, format_recursion,
)
from app.models.word import parse_word
from app.repositories.fixture_repository import FixtureRepository, cached_fixtures
from app.schemas.analysis import ClassTable
from app.schemas.fixtures import FixtureSet, FixtureStatus, FixtureVerdict, GroupEntry
from app.schemas.report import (
    AnalysisReport, Budgets, ClassificationSummary, RangeSummary, SpectrumSummary,
)
from app.services.contraction_service import ContractionService
from app.services.group_service import GroupService
from app.services.mealy_service import NUMBER_COUNT, MealyService
from app.services.spectra_service import SpectraService

logger = logging.getLogger(__name__)

COLLAPSING_RANGES = ((1, 729), (5104, NUMBER_COUNT))
FIXTURE_STATUS = {"yes": Verdict.YES, "no": Verdict.NO, "n/a": Verdict.UNKNOWN}


def _compact(text: str) -> str:
    return "".join(text.split())


class ReportService:
    def __init__(self):
        self.mealy = MealyService()
        self.groups = GroupService()
        self.contraction = ContractionService()
        self.spectra = SpectraService()

    # -- reports -------------------------------------------------------

    def report(self, number: int, budgets: Optional[Budgets] = None) -> AnalysisReport:
        """Report for the numbered automaton n"""
        automaton = self.mealy.decode_number(number)
        return self.report_for(automaton, budgets, number=number)

    def class_representative(self, number: int) -> int:
        """Least number in the minimal-symmetry class of an automaton number"""
        canonical, representative = self.mealy.symmetry_class(self.mealy.decode_number(number))
        if representative is not None:
            return representative
        for candidate in range(1, number + 1):
            if self.mealy.symmetry_class(self.mealy.decode_number(candidate))[0] == canonical:
                return candidate
        return number

    def report_for(self, automaton: Automaton, budgets: Optional[Budgets] = None,
                   number: Optional[int] = None) -> AnalysisReport:
        """Assemble every per-automaton computation within the budgets"""
        budgets = budgets or Budgets.from_settings()
        recursion = format_recursion(automaton)
        timer = metrics_logger.start_timer(f"report:{recursion}")
        try:
            minimized = self.mealy.minimize(automaton)
            small_group = self.mealy.small_group_label(automaton) if automaton.d == 2 else None
            isomorphic_to = None
            fixtures = cached_fixtures(str(settings.fixtures_path))
            if number is not None and fixtures is not None:
                isomorphic_to = fixtures.isomorphism_map().get(number)

            finite = self.groups.enumerate_if_finite(automaton, budgets.finite_check_cap)
            contraction = self.contraction.contraction_status(automaton) if budgets.include_contraction else None
            if automaton.d == 2:
                sf = self.groups.sf_exponents(automaton, budgets.sf_level)
                self_replicating = self.groups.self_replicating_check(
                    automaton, budgets.self_replicating_radius, budgets.self_replicating_depth,
                ).status
            else:
                sf = []
                self_replicating = Verdict.UNKNOWN
            activity = [self.contraction.activity_class(automaton, s) for s in range(automaton.m)]

            dual = self.mealy.dual(automaton)
            if dual == Invertibility.NOT_INVERTIBLE:
                dual_text = dual.value
            else:
                dual_text = format_recursion(dual, letter_names=[automaton.name(s) for s in range(automaton.m)])

            spectrum = None
            if budgets.spectrum_level is not None:
                result = self.spectra.spectrum(automaton, budgets.spectrum_level)
                spectrum = SpectrumSummary(
                    level=budgets.spectrum_level, bin_edges=result.bin_edges, counts=result.counts,
                )

            report = AnalysisReport(
                number=number,
                recursion=recursion,
                class_representative=self.class_representative(number) if number is not None else None,
                reduced_states=minimized.m,
                small_group=small_group.value if small_group else None,
                isomorphic_to=isomorphic_to,
                sf_exponents=sf,
                growth=self.groups.growth_sequence(automaton, budgets.growth_radius),
                relators=[str(w) for w in self.groups.relator_search(automaton, budgets.relator_radius)],
                finite_order=finite if finite != OrderStatus.UNKNOWN else None,
                level_transitive=self.groups.group_level_transitive(automaton, budgets.transitivity_depth),
                contraction=contraction,
                self_replicating=self_replicating,
                activity=activity,
                bounded=all(a.kind == ActivityKind.BOUNDED for a in activity),
                flags=self.mealy.structural_flags(automaton),
                dual=dual_text,
                spectrum=spectrum,
            )
        except Exception as e:
            metrics_logger.end_timer(timer)
            logger.error(f"Report for {recursion} failed: {e}")
            raise
        duration = metrics_logger.end_timer(timer, number=number)
        metrics_logger.log_analysis(
            recursion, "report", contraction.status.value if contraction else "skipped",
            number=number, duration_ms=duration,
        )
        return report

    # -- classification ------------------------------------------------

    def run_classification(self, budgets: Optional[Budgets] = None, jobs: Optional[int] = None,
                           table: Optional[ClassTable] = None) -> ClassificationSummary:
        """Class counts, finite orders of the representatives and the collapsing ranges"""
        budgets = budgets or Budgets.from_settings()
        table = table or self.mealy.classify_all(jobs)
        finite_orders = {}
        for representative in table.representatives:
            order = self.groups.enumerate_if_finite(
                self.mealy.decode_number(representative), budgets.finite_check_cap,
            )
            if order != OrderStatus.UNKNOWN:
                finite_orders[representative] = order
        ranges = []
        for first, last in COLLAPSING_RANGES:
            shared = {table.class_rep[n] for n in range(first, last + 1)}
            ranges.append(RangeSummary(first=first, last=last, representative=shared.pop() if len(shared) == 1 else None))
        small = sum(1 for count in table.reduced_state_count.values() if count < 3)
        logger.info(f"Classification summary: {len(table.representatives)} classes, {len(finite_orders)} finite")
        return ClassificationSummary(
            class_count=len(table.representatives),
            small_class_count=small,
            finite_orders=finite_orders,
            ranges=ranges,
            table=table,
        )

    # -- fixtures ------------------------------------------------------

    def verify_fixtures(self, path: Union[str, Path], budgets: Optional[Budgets] = None,
                        statuses: bool = False, jobs: Optional[int] = None,
                        classification: bool = True) -> List[FixtureVerdict]:
        """Recompute every transcribed fact within the budgets"""
        budgets = budgets or Budgets.from_settings()
        fixtures = FixtureRepository().load(path)
        verdicts: List[FixtureVerdict] = []
        if classification:
            verdicts += self._classification_verdicts(fixtures, budgets, jobs)
        else:
            verdicts.append(FixtureVerdict(fact="class table", status=FixtureStatus.SKIPPED,
                                           section=fixtures.equivalence_section))
        for item in fixtures.finite_orders:
            order = self.groups.enumerate_if_finite(self.mealy.decode_number(item.number), budgets.finite_check_cap)
            verdicts.append(self._compare(f"finite order {item.number}", item.section, item.order, order))
        for entry in fixtures.entries:
            verdicts += self._entry_verdicts(entry, budgets, statuses)
        metrics_logger.log_fixture_verdicts(str(path), [v.status.value for v in verdicts])
        return verdicts

    @staticmethod
    def _compare(fact: str, section: str, expected, computed) -> FixtureVerdict:
        status = FixtureStatus.PASS if expected == computed else FixtureStatus.FAIL
        return FixtureVerdict(
            fact=fact, status=status, section=section,
            expected=str(expected), computed=str(computed.value if hasattr(computed, "value") else computed),
        )

    def _classification_verdicts(self, fixtures: FixtureSet, budgets: Budgets,
                                 jobs: Optional[int]) -> List[FixtureVerdict]:
        summary = self.run_classification(budgets, jobs)
        headline = fixtures.headline
        verdicts = [
            self._compare("class count", headline.section, headline.class_count, summary.class_count),
            self._compare("small class count", headline.section, headline.small_class_count, summary.small_class_count),
            self._compare("finite group count", headline.section, headline.finite_group_count, len(summary.finite_orders)),
        ]
        for fact in ("isomorphism class bound", "abelian group count"):
            verdicts.append(FixtureVerdict(fact=fact, status=FixtureStatus.SKIPPED, section=headline.section))

        expected = fixtures.class_map()
        mismatches = [n for n, rep in sorted(expected.items()) if summary.table.class_rep.get(n) != rep]
        if mismatches:
            n = mismatches[0]
            verdicts.append(FixtureVerdict(
                fact=f"class table ({len(mismatches)} mismatches, first {n})", status=FixtureStatus.FAIL,
                section=fixtures.equivalence_section, expected=str(expected[n]),
                computed=str(summary.table.class_rep.get(n)),
            ))
        else:
            verdicts.append(FixtureVerdict(fact=f"class table ({len(expected)} rows)", status=FixtureStatus.PASS,
                                           section=fixtures.equivalence_section))
        for span in fixtures.equivalence_ranges:
            shared = {summary.table.class_rep[n] for n in range(span.first, span.last + 1)}
            computed = shared.pop() if len(shared) == 1 else sorted(shared)
            verdicts.append(self._compare(f"range {span.first}..{span.last}", span.section, span.representative, computed))
        return verdicts

    def _entry_verdicts(self, entry: GroupEntry, budgets: Budgets, statuses: bool) -> List[FixtureVerdict]:
        n = entry.number
        automaton = self.mealy.decode_number(n)
        verdicts = [self._compare(
            f"{n} recursion", entry.section, _compact(entry.recursion), _compact(format_recursion(automaton)),
        )]
        if entry.sf:
            top = min(len(entry.sf) - 1, budgets.sf_level)
            verdicts.append(self._compare(
                f"{n} SF 0..{top}", entry.section, entry.sf[:top + 1], self.groups.sf_exponents(automaton, top),
            ))
        if entry.gr:
            top = min(len(entry.gr) - 1, budgets.growth_radius)
            verdicts.append(self._compare(
                f"{n} Gr 0..{top}", entry.section, entry.gr[:top + 1],
                self.groups.growth_sequence(automaton, top).counts,
            ))
        for text in entry.relators:
            try:
                holds = self.groups.verify_relator(automaton, parse_word(text, automaton))
            except WordSyntaxError as e:
                verdicts.append(FixtureVerdict(fact=f"{n} relator {text}", status=FixtureStatus.FAIL,
                                               section=entry.section, expected="identity", computed=str(e)))
                continue
            verdicts.append(self._compare(f"{n} relator {text}", entry.section, True, holds))

        checks: List[tuple] = [
            ("contracting", entry.contracting, lambda: self.contraction.contraction_status(automaton).status),
            ("self-replicating", entry.self_replicating, lambda: self.groups.self_replicating_check(
                automaton, budgets.self_replicating_radius, budgets.self_replicating_depth).status),
        ]
        for name, expected_text, compute in checks:
            verdicts.append(self._status_verdict(f"{n} {name}", entry.section, expected_text, compute, statuses))
        return verdicts

    def _status_verdict(self, fact: str, section: str, expected_text: str,
                        compute: Callable[[], Verdict], enabled: bool) -> FixtureVerdict:
        if not enabled:
            return FixtureVerdict(fact=fact, status=FixtureStatus.SKIPPED, section=section, expected=expected_text)
        expected = FIXTURE_STATUS[expected_text]
        try:
            computed = compute()
        except AutomGrpError as e:
            logger.warning(f"{fact}: {e}")
            return FixtureVerdict(fact=fact, status=FixtureStatus.SKIPPED, section=section, expected=expected_text)
        if Verdict.UNKNOWN in (expected, computed) and expected != computed:
            return FixtureVerdict(fact=fact, status=FixtureStatus.SKIPPED, section=section,
                                  expected=expected_text, computed=computed.value)
        return self._compare(fact, section, expected.value, computed)

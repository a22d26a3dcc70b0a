import json

import pytest

from app.models.automaton import Verdict
from app.schemas.fixtures import FixtureStatus
from app.schemas.report import Budgets
from app.services.report_service import ReportService


@pytest.fixture(scope="module")
def service() -> ReportService:
    return ReportService()


def small_budgets(**overrides) -> Budgets:
    values = dict(sf_level=6, growth_radius=3, relator_radius=2)
    values.update(overrides)
    return Budgets.from_settings(**values)


def write_fixtures(path, entries):
    document = {
        "version": 1,
        "headline": {"section": "classification", "class_count": 194, "small_class_count": 10,
                     "isomorphism_class_bound": 122, "finite_group_count": 6, "abelian_group_count": 6},
        "finite_orders": [],
        "equivalence_ranges": [],
        "equivalence_section": "class-table",
        "equivalence": [],
        "entries": entries,
    }
    path.write_text(json.dumps(document, ensure_ascii=False, indent=2), encoding="utf-8")
    return path


class TestReport:
    def test_trivial_group(self, service):
        report = service.report(1, small_budgets(relator_radius=1))
        assert report.growth.counts == [1, 1, 1, 1]
        assert report.relators == ["a", "b", "c"]
        assert report.finite_order == 1
        assert report.contraction.status == Verdict.YES
        assert report.small_group == "trivial"
        assert report.reduced_states == 1
        assert report.class_representative == 1
        assert report.sf_exponents == [0] * 7

    def test_cyclic_group(self, service):
        report = service.report(731, small_budgets(sf_level=8))
        assert report.sf_exponents == list(range(9))
        assert report.growth.counts == [1, 5, 9, 13]
        assert report.contraction.status == Verdict.YES
        assert report.self_replicating == Verdict.YES
        assert report.level_transitive == Verdict.YES
        assert report.finite_order is None
        assert report.class_representative == 731
        assert report.spectrum is None

    @pytest.mark.parametrize("n, representative", [(731, 731), (742, 740), (1, 1)])
    def test_class_representative(self, service, n, representative):
        assert service.class_representative(n) == representative

    def test_optional_parts(self, service, adding_machine):
        report = service.report_for(adding_machine, small_budgets(include_contraction=False, spectrum_level=3))
        assert report.number is None
        assert report.contraction is None
        assert report.spectrum.level == 3
        assert sum(report.spectrum.counts) == 8
        assert report.bounded

    def test_deterministic(self, service):
        budgets = small_budgets(include_contraction=False)
        first = service.report(748, budgets).model_dump_json()
        second = service.report(748, budgets).model_dump_json()
        assert first == second


class TestFixtureVerification:
    def test_passing_entry(self, service, fixture_set, tmp_path):
        entry = fixture_set.entry(731).model_dump()
        path = write_fixtures(tmp_path / "fixtures.json", [entry])
        verdicts = service.verify_fixtures(path, small_budgets(growth_radius=4), classification=False)
        statuses = [v.status for v in verdicts]
        assert FixtureStatus.FAIL not in statuses
        assert statuses.count(FixtureStatus.PASS) == 5
        assert statuses.count(FixtureStatus.SKIPPED) == 3

    def test_corrupted_value_fails(self, service, fixture_set, tmp_path):
        entry = fixture_set.entry(731).model_dump()
        entry["sf"] = [0, 1, 2, 3, 5]
        path = write_fixtures(tmp_path / "fixtures.json", [entry])
        verdicts = service.verify_fixtures(path, small_budgets(), classification=False)
        failed = [v for v in verdicts if v.status == FixtureStatus.FAIL]
        assert len(failed) == 1
        assert failed[0].fact == "731 SF 0..4"
        assert failed[0].computed == "[0, 1, 2, 3, 4]"

    def test_unparseable_relator_fails(self, service, fixture_set, tmp_path):
        entry = fixture_set.entry(731).model_dump()
        entry["relators"] = ["a^"]
        path = write_fixtures(tmp_path / "fixtures.json", [entry])
        verdicts = service.verify_fixtures(path, small_budgets(), classification=False)
        assert [v.fact for v in verdicts if v.status == FixtureStatus.FAIL] == ["731 relator a^"]

    def test_statuses(self, service, fixture_set, tmp_path):
        entry = fixture_set.entry(731).model_dump()
        path = write_fixtures(tmp_path / "fixtures.json", [entry])
        verdicts = service.verify_fixtures(path, small_budgets(), statuses=True, classification=False)
        by_fact = {v.fact: v.status for v in verdicts}
        assert by_fact["731 contracting"] == FixtureStatus.PASS
        assert by_fact["731 self-replicating"] == FixtureStatus.PASS

    def test_unknown_against_a_verdict_is_skipped(self, service):
        verdict = service._status_verdict("x", "s", "n/a", lambda: Verdict.YES, True)
        assert verdict.status == FixtureStatus.SKIPPED


@pytest.mark.slow
def test_classification_summary(service):
    summary = service.run_classification(jobs=1)
    assert summary.class_count == 194
    assert summary.small_class_count == 10
    assert summary.finite_orders == {1: 1, 730: 4, 748: 16, 802: 8, 847: 8, 1090: 2}
    assert [span.representative for span in summary.ranges] == [1, 1090]

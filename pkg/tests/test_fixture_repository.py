import pytest

from app.core.errors import FixtureParseError
from app.repositories.fixture_repository import FixtureRepository
from app.schemas.fixtures import FixtureStatus, FixtureVerdict


class TestLoad:
    def test_entries(self, fixture_set):
        assert len(fixture_set.entries) == 122
        assert fixture_set.entry(2240).group == "F_3"
        assert fixture_set.entry(2240).contracting == "no"
        assert fixture_set.entry(5) is None

    def test_class_map_covers_every_number(self, fixture_set):
        mapping = fixture_set.class_map()
        assert len(mapping) == 5832
        assert mapping[742] == 740
        assert mapping[5832] == 1090

    def test_headline(self, fixture_set):
        assert fixture_set.headline.class_count == 194
        assert fixture_set.headline.small_class_count == 10

    def test_missing_file(self, tmp_path):
        assert FixtureRepository().try_load(tmp_path / "absent.json") is None
        with pytest.raises(FixtureParseError):
            FixtureRepository().load(tmp_path / "absent.json")


class TestParseErrors:
    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "version": 1,\n  oops\n}\n', encoding="utf-8")
        with pytest.raises(FixtureParseError) as info:
            FixtureRepository().load(path)
        assert info.value.line == 3

    def test_invalid_value_reports_entry_line(self, tmp_path, fixtures_path):
        text = fixtures_path.read_text(encoding="utf-8")
        lines = text.splitlines()
        target = next(i for i, line in enumerate(lines) if line.lstrip().startswith('{"number": 2240,'))
        lines[target] = lines[target].replace('"contracting": "no"', '"contracting": "maybe"')
        path = tmp_path / "fixtures.json"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(FixtureParseError) as info:
            FixtureRepository().load(path)
        assert info.value.line == target + 1
        assert "contracting" in str(info.value)


def test_verdict_line():
    verdict = FixtureVerdict(fact="sf 2240", status=FixtureStatus.FAIL, section="group-info",
                             expected="[0, 1]", computed="[0, 2]")
    assert verdict.line() == "FAIL sf 2240 (expected [0, 1], computed [0, 2])"
    assert FixtureVerdict(fact="x", status=FixtureStatus.PASS, section="s").line() == "PASS x"

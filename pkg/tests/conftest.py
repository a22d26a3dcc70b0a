from functools import lru_cache
from pathlib import Path

import pytest

from app.models.automaton import Automaton, parse_recursion
from app.models.word import parse_symbols
from app.repositories.fixture_repository import FixtureRepository
from app.services.mealy_service import MealyService
from app.services.tree_action_service import TreeActionService

ROOT = Path(__file__).resolve().parent.parent
FIXTURES_PATH = ROOT / "data" / "fixtures.json"


@pytest.fixture(scope="session")
def mealy() -> MealyService:
    return MealyService()


@pytest.fixture(scope="session")
def numbered(mealy):
    """Automaton by number"""
    return mealy.decode_number


@pytest.fixture(scope="session")
def engine(numbered):
    """Tree-action engine by automaton number or Automaton, shared across the session"""
    @lru_cache(maxsize=None)
    def cached(automaton: Automaton) -> TreeActionService:
        return TreeActionService(automaton)

    def build(target) -> TreeActionService:
        return cached(target if isinstance(target, Automaton) else numbered(target))
    return build


@pytest.fixture(scope="session")
def word():
    """Symbols of a word in the relator notation"""
    def parse(text: str, automaton: Automaton):
        return parse_symbols(text, automaton)
    return parse


@pytest.fixture
def adding_machine() -> Automaton:
    return parse_recursion("a=σ(1,a)")


@pytest.fixture(scope="session")
def fixture_set():
    return FixtureRepository().load(FIXTURES_PATH)


@pytest.fixture(scope="session")
def fixtures_path() -> Path:
    return FIXTURES_PATH

# Repository layer for flat-file data
from .json_repository import JsonRepository
from .fixture_repository import FixtureRepository

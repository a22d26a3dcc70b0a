from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

from app.core.config import settings
from app.repositories.json_repository import JsonRepository
from app.schemas.fixtures import FixtureSet


class FixtureRepository(JsonRepository[FixtureSet]):
    """Transcribed expected values, read from a JSON document"""

    def __init__(self):
        super().__init__(FixtureSet)

    def load_default(self) -> FixtureSet:
        return self.load(settings.fixtures_path)

    def try_load(self, path: Optional[Union[str, Path]] = None) -> Optional[FixtureSet]:
        """The fixture set, or None when the file is absent"""
        path = Path(path or settings.fixtures_path)
        if not path.exists():
            return None
        return self.load(path)


@lru_cache(maxsize=4)
def cached_fixtures(path: str) -> Optional[FixtureSet]:
    return FixtureRepository().try_load(path)

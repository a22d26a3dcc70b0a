import json
import logging
from pathlib import Path
from typing import Generic, Optional, Sequence, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from app.core.errors import FixtureParseError

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)


def locate_line(text: str, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """Best-effort line of a validation error location.

    Keys are searched in order; a list index after a key is taken as a
    line offset, matching the one-item-per-line layout of the data files.
    """
    position = 0
    line = None
    for part in loc:
        if isinstance(part, str):
            found = text.find(f'"{part}"', position)
            if found < 0:
                break
            position = found
            line = text.count("\n", 0, found) + 1
        elif line is not None:
            return line + 1 + part
    return line


class JsonRepository(Generic[T]):
    """Flat-file persistence of one pydantic document"""

    def __init__(self, model_class: Type[T]):
        self.model_class = model_class

    def parse(self, text: str) -> T:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise FixtureParseError(f"invalid JSON: {e.msg}", line=e.lineno) from e
        try:
            return self.model_class.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            raise FixtureParseError(f"{where}: {first['msg']}", line=locate_line(text, first["loc"])) from e

    def load(self, path: Union[str, Path]) -> T:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Cannot read {path}: {e}")
            raise FixtureParseError(f"cannot read {path}: {e.strerror}") from e
        document = self.parse(text)
        logger.info(f"Loaded {self.model_class.__name__} from {path}")
        return document

    def save(self, document: T, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote {self.model_class.__name__} to {path}")
        return path

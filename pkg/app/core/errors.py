"""Domain exceptions raised by the analysis services."""
from typing import Optional


class AutomGrpError(Exception):
    """Base class for every error raised on purpose by this package"""


class OutOfRangeError(AutomGrpError, ValueError):
    """Automaton number outside 1..5832"""

    def __init__(self, number: int, low: int = 1, high: int = 5832):
        self.number = number
        super().__init__(f"Automaton number {number} is outside {low}..{high}")


class ShapeError(AutomGrpError, ValueError):
    """Automaton has the wrong number of states or letters for the operation"""


class LevelTooDeepError(AutomGrpError, ValueError):
    """Level exceeds the configured vertex limit"""

    def __init__(self, d: int, level: int, limit: int):
        self.level = level
        super().__init__(f"Level {level} has {d ** level} vertices, above the limit {limit}")


class NotContractingError(AutomGrpError):
    """No nucleus is available for the automaton"""


class NonSymmetricMatrixError(AutomGrpError, ValueError):
    """Matrix passed to the symmetric eigen-solver is not symmetric"""


class WordSyntaxError(AutomGrpError, ValueError):
    """Word text could not be parsed"""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class FixtureParseError(AutomGrpError, ValueError):
    """Fixture file could not be parsed or validated"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")

import logging
import sys
import itertools
import json
import threading
import time
from datetime import datetime, timezone
from typing import Dict, Optional, Sequence
from pathlib import Path
from app.core.config import settings

_RESERVED = {
    'name', 'msg', 'args', 'levelname', 'levelno', 'pathname', 'filename', 'module',
    'lineno', 'funcName', 'created', 'msecs', 'relativeCreated', 'thread', 'threadName',
    'processName', 'process', 'getMessage', 'exc_info', 'exc_text', 'stack_info',
    'taskName', 'message',
}


class StructuredFormatter(logging.Formatter):
    """Custom formatter for structured JSON logging"""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as structured JSON"""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno
        }

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        # Extra fields passed through `extra=`
        for key, value in record.__dict__.items():
            if key not in _RESERVED:
                log_entry[key] = value

        return json.dumps(log_entry, default=str)


class AnalysisLoggingFilter(logging.Filter):
    """Filter that normalises analysis context fields on log records"""

    FIELDS = ("automaton", "operation", "level", "radius", "duration_ms")

    def filter(self, record: logging.LogRecord) -> bool:
        for field in self.FIELDS:
            if hasattr(record, field):
                setattr(record, field, getattr(record, field, None))
        return True


def _file_handler(path: Path, level: int) -> logging.Handler:
    handler = logging.FileHandler(path)
    handler.setLevel(level)
    handler.setFormatter(StructuredFormatter())
    handler.addFilter(AnalysisLoggingFilter())
    return handler


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None):
    """Configure structured logging for the command line tools"""
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, (level or settings.log_level).upper(), logging.INFO))

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # stdout carries command output, so console logs go to stderr
    if settings.log_console_enabled:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(StructuredFormatter())
        console_handler.addFilter(AnalysisLoggingFilter())
        root_logger.addHandler(console_handler)

    if not settings.log_file_enabled:
        root_logger.addHandler(logging.NullHandler())
        return

    logs_dir = Path(log_dir or settings.log_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)

    root_logger.addHandler(_file_handler(logs_dir / "app.log", logging.DEBUG))
    root_logger.addHandler(_file_handler(logs_dir / "errors.log", logging.ERROR))

    # Per-automaton pipeline events
    analysis_logger = logging.getLogger("analysis")
    analysis_logger.handlers.clear()
    analysis_logger.addHandler(_file_handler(logs_dir / "analysis.log", logging.INFO))
    analysis_logger.propagate = False

    # Performance logger for timings
    perf_logger = logging.getLogger("performance")
    perf_logger.handlers.clear()
    perf_logger.addHandler(_file_handler(logs_dir / "performance.log", logging.INFO))
    perf_logger.propagate = False


class MetricsLogger:
    """Logger for analysis metrics and timing data"""

    def __init__(self):
        self.logger = logging.getLogger("performance")
        self.analysis_logger = logging.getLogger("analysis")
        self.start_times: Dict[str, float] = {}
        self._sequence = itertools.count(1)
        self._lock = threading.Lock()

    def start_timer(self, operation_id: str) -> str:
        """Start timing an operation; the returned key ends this run only"""
        with self._lock:
            timer_key = f"{operation_id}#{next(self._sequence)}"
            self.start_times[timer_key] = time.perf_counter()
        return timer_key

    def end_timer(self, timer_key: str, **extra_data) -> Optional[float]:
        """End timing an operation and log the duration"""
        with self._lock:
            started = self.start_times.pop(timer_key, None)
        if started is None:
            return None
        duration_ms = (time.perf_counter() - started) * 1000
        operation_id = timer_key.rpartition("#")[0] or timer_key
        self.logger.info(
            f"Operation completed: {operation_id}",
            extra={
                "operation_id": operation_id,
                "timer": timer_key,
                "duration_ms": round(duration_ms, 2),
                **extra_data
            }
        )
        return duration_ms

    def log_analysis(self, automaton: str, operation: str, outcome: str, **extra_data):
        """Log the outcome of one per-automaton computation"""
        self.analysis_logger.info(
            f"{operation} for {automaton}: {outcome}",
            extra={
                "event_type": "analysis",
                "automaton": automaton,
                "operation": operation,
                "outcome": outcome,
                **extra_data
            }
        )

    def log_classification(self, class_count: int, small_class_count: int, duration_ms: float, jobs: int):
        """Log a full classification run"""
        self.logger.info(
            f"Classification finished: {class_count} classes",
            extra={
                "event_type": "classification",
                "class_count": class_count,
                "small_class_count": small_class_count,
                "duration_ms": round(duration_ms, 2),
                "jobs": jobs
            }
        )

    def log_fixture_verdicts(self, path: str, statuses: Sequence[str]):
        """Log the tally of a fixture verification run"""
        tally = {status: statuses.count(status) for status in sorted(set(statuses))}
        self.analysis_logger.info(
            f"Fixtures verified from {path}",
            extra={
                "event_type": "fixture_verification",
                "path": path,
                "total": len(statuses),
                **tally
            }
        )

    def log_spectrum(self, automaton: str, level: int, size: int, sweeps: int, residual: float, duration_ms: float):
        """Log eigen-solver metrics"""
        self.logger.info(
            f"Spectrum computed: {automaton} level {level}",
            extra={
                "event_type": "spectrum",
                "automaton": automaton,
                "level": level,
                "matrix_size": size,
                "sweeps": sweeps,
                "residual": residual,
                "duration_ms": round(duration_ms, 2)
            }
        )


# Global metrics logger instance
metrics_logger = MetricsLogger()

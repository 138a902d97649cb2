import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator


logger = logging.getLogger(__name__)


class RunDiagnostics:
    """Mutable diagnostics record attached to a report: budgets, tails and timings."""

    def __init__(self) -> None:
        self.entries: Dict[str, Any] = {}
        self._started = time.perf_counter()

    def record(self, key: str, value: Any) -> None:
        self.entries[key] = value

    def update(self, values: Dict[str, Any]) -> None:
        self.entries.update(values)

    def as_dict(self) -> Dict[str, Any]:
        data = dict(self.entries)
        data["runtime_ms"] = int((time.perf_counter() - self._started) * 1000)
        return data


@contextmanager
def timed_operation(name: str, diagnostics: RunDiagnostics | None = None) -> Iterator[None]:
    """Log start and finish of an operation and store its elapsed milliseconds."""
    start_time = time.perf_counter()
    logger.info(f"Starting {name}")
    try:
        yield
    except Exception as e:
        elapsed = int((time.perf_counter() - start_time) * 1000)
        logger.error(f"{name} failed after {elapsed} ms: {str(e)}")
        raise
    elapsed = int((time.perf_counter() - start_time) * 1000)
    logger.info(f"Finished {name} in {elapsed} ms")
    if diagnostics is not None:
        diagnostics.record(f"{name}_ms", elapsed)

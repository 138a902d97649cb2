import threading
import time
from pathlib import Path

import pytest
from pydantic import ValidationError

from core.config import Settings
from core.errors import BudgetError, CorruptCacheError, InputValidationError, PoleError, WorkbenchError
from core.run_logging import RunDiagnostics, timed_operation
from core.workers import map_ordered


class TestSettings:
    def test_defaults(self):
        config = Settings(_env_file=None)
        assert config.threads == 1
        assert config.default_tol == 1e-8
        assert config.cache_dir == Path(".l4wb-cache")

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("L4WB_THREADS", "4")
        monkeypatch.setenv("L4WB_GRID_ORDER", "32")
        config = Settings(_env_file=None)
        assert config.threads == 4
        assert config.grid_order == 32

    def test_cache_alias(self, monkeypatch, tmp_path):
        monkeypatch.setenv("L4WB_CACHE", str(tmp_path))
        assert Settings(_env_file=None).cache_dir == tmp_path

    def test_rejects_invalid_threads(self, monkeypatch):
        monkeypatch.setenv("L4WB_THREADS", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)


class TestErrors:
    def test_exit_codes(self):
        assert InputValidationError("x").exit_code == 2
        assert PoleError("x").exit_code == 2
        assert BudgetError("x").exit_code == 3
        assert isinstance(PoleError("x"), ValueError)

    def test_corrupt_cache_location(self, tmp_path):
        error = CorruptCacheError(tmp_path / "q.txt", 4, "bad row")
        assert isinstance(error, WorkbenchError)
        assert error.line == 4
        assert str(error).endswith("q.txt:4: bad row")


class TestRunSupport:
    def test_timed_operation(self):
        diagnostics = RunDiagnostics()
        with timed_operation("sleep", diagnostics):
            time.sleep(0.01)
        data = diagnostics.as_dict()
        assert data["sleep_ms"] >= 5
        assert "runtime_ms" in data

    def test_map_ordered_keeps_order(self):
        seen = set()

        def job(i):
            seen.add(threading.get_ident())
            time.sleep(0.001 * (5 - i % 5))
            return i * i

        assert map_ordered(job, range(20), threads=4) == [i * i for i in range(20)]
        assert map_ordered(job, range(5), threads=1) == [0, 1, 4, 9, 16]

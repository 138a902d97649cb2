import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from core.config import settings
from core.errors import InputValidationError
from services.hecke_core import (
    CuspSpace,
    Eigenform,
    cusp_dimension,
    default_budget,
    eigenforms,
    victor_miller_basis,
)
from services.qcache import QCache


logger = logging.getLogger(__name__)


class FormLibrary:
    """Memoized spaces and eigenforms, backed by the disk cache."""

    def __init__(self, cache_dir: Optional[Path] = None, cache_enabled: bool = True):
        self._lock = threading.RLock()
        self._spaces: Dict[Tuple[int, int], CuspSpace] = {}
        self._forms: Dict[Tuple[int, int], List[Eigenform]] = {}
        self.configure(cache_dir or settings.cache_dir, cache_enabled)

    def configure(self, cache_dir: Path, cache_enabled: bool = True) -> None:
        with self._lock:
            self.cache = QCache(cache_dir) if cache_enabled else None

    def space(self, weight: int, truncation: int) -> CuspSpace:
        key = (weight, truncation)
        with self._lock:
            if key in self._spaces:
                return self._spaces[key]
            cached = self.cache.load(weight, truncation) if self.cache else None
            if cached is not None:
                logger.debug(f"Cache hit for weight {weight}, truncation {truncation}")
                space = cached.space
            else:
                space = victor_miller_basis(weight, truncation)
                if self.cache:
                    self.cache.save(space)
            self._spaces[key] = space
            return space

    def eigenforms(self, weight: int, budget: Optional[int] = None) -> List[Eigenform]:
        budget = budget or default_budget(weight)
        key = (weight, budget)
        with self._lock:
            if key not in self._forms:
                d = cusp_dimension(weight)
                if d == 0:
                    self._forms[key] = []
                else:
                    space = self.space(weight, max(budget, 5 * d))
                    self._forms[key] = eigenforms(space, budget)
            return self._forms[key]

    def eigenform(self, weight: int, label: int, budget: Optional[int] = None) -> Eigenform:
        forms = self.eigenforms(weight, budget)
        if not 0 <= label < len(forms):
            raise InputValidationError(f"Weight {weight} has {len(forms)} eigenforms; index {label} is out of range")
        return forms[label]


# Global form library instance
form_library = FormLibrary(cache_enabled=settings.cache_enabled)

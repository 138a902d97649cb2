"""Line-oriented disk cache for Victor Miller bases.

File layout (UTF-8)::

    L4WB-QCACHE v1
    weight <k>
    dimension <d>
    truncation <N>
    basis <i>            (repeated d times)
    <c(0) c(1) ... c(N)>
    t2
    <row 1> ... <row d>
    end
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import List, NamedTuple, Optional

from sympy import Matrix

from core.errors import CorruptCacheError
from services.hecke_core import CuspSpace, QSeries, hecke_matrix


logger = logging.getLogger(__name__)

HEADER = "L4WB-QCACHE v1"


class CachedSpace(NamedTuple):
    space: CuspSpace
    t2: Optional[Matrix]


class QCache:
    """One cache file per (weight, truncation) under ``directory``."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, weight: int, truncation: int) -> Path:
        return self.directory / f"qcache_k{weight}_N{truncation}.txt"

    def save(self, space: CuspSpace) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        lines = [
            HEADER,
            f"weight {space.weight}",
            f"dimension {space.dimension}",
            f"truncation {space.truncation}",
        ]
        for i, row in enumerate(space.rows, start=1):
            lines.append(f"basis {i}")
            lines.append(" ".join(str(c) for c in row))
        if space.dimension and space.truncation >= 2 * space.dimension:
            t2 = hecke_matrix(space, 2)
            lines.append("t2")
            for i in range(space.dimension):
                lines.append(" ".join(str(int(t2[i, j])) for j in range(space.dimension)))
        lines.append("end")

        path = self.path_for(space.weight, space.truncation)
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write("\n".join(lines) + "\n")
            os.replace(tmp_name, path)
        except OSError:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.debug(f"Wrote cache file {path}")
        return path

    def load(self, weight: int, truncation: int) -> Optional[CachedSpace]:
        path = self.path_for(weight, truncation)
        if not path.exists():
            return None
        return self.read(path)

    def read(self, path: Path) -> CachedSpace:
        lines = path.read_text(encoding="utf-8").splitlines()
        reader = _LineReader(path, lines)

        header = reader.next()
        if header != HEADER:
            raise CorruptCacheError(path, 1, f"unsupported header {header!r}, expected {HEADER!r}")
        weight = reader.keyed_int("weight")
        dimension = reader.keyed_int("dimension")
        truncation = reader.keyed_int("truncation")

        basis = []
        for i in range(1, dimension + 1):
            index = reader.keyed_int("basis")
            if index != i:
                raise CorruptCacheError(path, reader.line_number, f"expected basis {i}, found {index}")
            row = reader.integers()
            if len(row) != truncation + 1:
                raise CorruptCacheError(
                    path, reader.line_number, f"expected {truncation + 1} coefficients, found {len(row)}"
                )
            basis.append(QSeries.from_values(weight, row))

        space = CuspSpace(weight, dimension, tuple(basis), truncation)
        t2 = None
        marker = reader.next()
        if marker == "t2":
            t2_line = reader.line_number + 1
            rows = [reader.integers() for _ in range(dimension)]
            if any(len(row) != dimension for row in rows):
                raise CorruptCacheError(path, reader.line_number, "T2 matrix has the wrong shape")
            t2 = Matrix(rows)
            if t2 != hecke_matrix(space, 2):
                raise CorruptCacheError(path, t2_line, "T2 matrix does not match the basis")
            marker = reader.next()
        if marker != "end":
            raise CorruptCacheError(path, reader.line_number, f"expected 'end', found {marker!r}")

        return CachedSpace(space, t2)


class _LineReader:
    def __init__(self, path: Path, lines: List[str]):
        self.path = path
        self.lines = lines
        self.line_number = 0

    def next(self) -> str:
        if self.line_number >= len(self.lines):
            raise CorruptCacheError(self.path, self.line_number + 1, "unexpected end of file")
        line = self.lines[self.line_number].strip()
        self.line_number += 1
        return line

    def keyed_int(self, key: str) -> int:
        line = self.next()
        parts = line.split()
        if len(parts) != 2 or parts[0] != key:
            raise CorruptCacheError(self.path, self.line_number, f"expected '{key} <int>', found {line!r}")
        try:
            return int(parts[1])
        except ValueError:
            raise CorruptCacheError(self.path, self.line_number, f"invalid integer {parts[1]!r}")

    def integers(self) -> List[int]:
        line = self.next()
        try:
            return [int(token) for token in line.split()]
        except ValueError:
            raise CorruptCacheError(self.path, self.line_number, "invalid integer coefficient")


def cache_roundtrip(space: CuspSpace, directory: Path) -> CachedSpace:
    """Serialize then deserialize ``space`` through ``directory``."""
    cache = QCache(directory)
    path = cache.save(space)
    return cache.read(path)

import pytest

from core.errors import CorruptCacheError
from services.form_library import FormLibrary
from services.hecke_core import hecke_matrix, victor_miller_basis
from services.qcache import HEADER, QCache, cache_roundtrip


@pytest.fixture
def weight24_space():
    return victor_miller_basis(24, 12)


def test_roundtrip_weight_12(tmp_path):
    space = victor_miller_basis(12, 30)
    cached = cache_roundtrip(space, tmp_path)
    assert cached.space.rows == space.rows
    assert cached.space.truncation == 30
    assert cached.t2[0, 0] == -24


def test_roundtrip_keeps_hecke_matrix(tmp_path, weight24_space):
    cached = cache_roundtrip(weight24_space, tmp_path)
    assert cached.t2 == hecke_matrix(weight24_space, 2)
    assert cached.t2.trace() == 1080


def test_missing_file_is_a_miss(tmp_path):
    assert QCache(tmp_path).load(12, 30) is None


def test_header_mismatch(tmp_path, weight24_space):
    path = QCache(tmp_path).save(weight24_space)
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[0] = "L4WB-QCACHE v0"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(CorruptCacheError) as exc_info:
        QCache(tmp_path).read(path)
    assert exc_info.value.line == 1
    assert exc_info.value.path == path


def test_truncated_file(tmp_path, weight24_space):
    path = QCache(tmp_path).save(weight24_space)
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:6]) + "\n", encoding="utf-8")

    with pytest.raises(CorruptCacheError) as exc_info:
        QCache(tmp_path).read(path)
    assert exc_info.value.line == 7


def test_short_coefficient_row(tmp_path, weight24_space):
    path = QCache(tmp_path).save(weight24_space)
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[5] = " ".join(lines[5].split()[:-1])
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(CorruptCacheError, match="coefficients"):
        QCache(tmp_path).read(path)


def test_tampered_hecke_matrix(tmp_path, weight24_space):
    path = QCache(tmp_path).save(weight24_space)
    lines = path.read_text(encoding="utf-8").splitlines()
    t2_row = lines.index("t2") + 1
    entries = lines[t2_row].split()
    entries[0] = str(int(entries[0]) + 1)
    lines[t2_row] = " ".join(entries)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(CorruptCacheError, match="does not match") as exc_info:
        QCache(tmp_path).read(path)
    assert exc_info.value.line == t2_row + 1


def test_library_reads_back_cached_space(tmp_path):
    first = FormLibrary(tmp_path)
    space = first.space(24, 12)
    path = first.cache.path_for(24, 12)
    assert path.read_text(encoding="utf-8").startswith(HEADER)

    second = FormLibrary(tmp_path)
    assert second.space(24, 12).rows == space.rows


def test_library_without_cache(tmp_path):
    library = FormLibrary(tmp_path, cache_enabled=False)
    library.space(12, 20)
    assert not any(tmp_path.iterdir())

import pytest

from services.form_library import form_library


@pytest.fixture(scope="session", autouse=True)
def cache_dir(tmp_path_factory):
    """Point the shared form library at a throwaway cache for the whole run."""
    directory = tmp_path_factory.mktemp("qcache")
    form_library.configure(directory, cache_enabled=True)
    yield directory


@pytest.fixture(scope="session")
def delta_form():
    return form_library.eigenform(12, 0)


@pytest.fixture(scope="session")
def weight24_forms():
    return form_library.eigenforms(24)


@pytest.fixture(scope="session")
def delta_long():
    """Delta with coefficients up to 10^4 for long Dirichlet sums."""
    return form_library.eigenform(12, 0, budget=10000)

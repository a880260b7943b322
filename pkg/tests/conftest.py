import pytest


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """Isolated multiplication-table cache for the whole test session."""
    return str(tmp_path_factory.mktemp("sgcache"))

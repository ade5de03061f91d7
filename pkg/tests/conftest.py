import pytest

from ghl.cache import ResultCache
from ghl.coeffmod import regular_module, trivial_module
from ghl.config import settings
from ghl.groups import cyclic, dihedral, klein4, symmetric


@pytest.fixture
def z2():
    return cyclic(2)


@pytest.fixture
def z3():
    return cyclic(3)


@pytest.fixture
def z4():
    return cyclic(4)


@pytest.fixture
def v4():
    return klein4()


@pytest.fixture
def s3():
    return symmetric(3)


@pytest.fixture
def d4():
    return dihedral(4)


@pytest.fixture
def trivial_z():
    """Factory: trivial Z (or Z/m) over a group."""
    def make(group, m=None):
        return trivial_module(group, None if m is None else [m])
    return make


@pytest.fixture
def regular():
    def make(group, side="right"):
        return regular_module(group, side)
    return make


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    """Point the result cache at a fresh directory for one test."""
    directory = tmp_path / "cache"
    monkeypatch.setattr(settings, "ghl_cache_dir", str(directory))
    monkeypatch.setattr(settings, "ghl_cache_enabled", True)
    return directory


@pytest.fixture
def result_cache(cache_dir):
    return ResultCache(str(cache_dir))

import pytest

from addcube import cube_graph, spectral_bounds


@pytest.fixture(scope="session")
def uset():
    return spectral_bounds.enumerate_U()


@pytest.fixture(scope="session")
def report(uset):
    return cube_graph.bfs_verify(uset)

import numpy as np
import pytest

from acgraph import graphs, potential


@pytest.fixture(scope="session")
def quartic():
    return potential.quartic(-1.0, 1.0)


@pytest.fixture(scope="session")
def quartic_constants(quartic):
    return potential.derive_constants(quartic)


@pytest.fixture(scope="session")
def tree36():
    return graphs.build_tree(3, 6)


@pytest.fixture(scope="session")
def tree38():
    return graphs.build_tree(3, 8)


@pytest.fixture(scope="session")
def tiling376():
    return graphs.build_tiling(3, 7, 6)


@pytest.fixture(scope="session")
def tiling378():
    return graphs.build_tiling(3, 7, 8)


@pytest.fixture(scope="session")
def line40():
    return graphs.build_control_line(40)


@pytest.fixture
def rng():
    return np.random.default_rng(0)

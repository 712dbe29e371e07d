import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from structree.fixtures import load_fixture
from structree.truncation import expand_ball


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in
            ("DR", "LADDER", "TRI", "TRIP3", "T23SUB", "TREE3", "C4")}


@pytest.fixture(scope="session")
def balls(fixtures):
    """B_4 around the root of every fixture, shared across tests."""
    return {name: expand_ball(g, g.root_vertex(), 4) for name, g in fixtures.items()}

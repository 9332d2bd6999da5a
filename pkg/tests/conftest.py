"""Test fixtures for hypersketch.

Provides:
- A desk-scale SketchConfig and a fixed master-seed PRF
- Small named hypergraphs (triangle, path, joined triangles, K4, one hyperedge)
- Seeded numpy generators for random and planted instances
- Paths to the text fixtures under tests/fixtures
"""

import os
from pathlib import Path

import numpy as np
import pytest

# Quiet the settings singleton built at import time
os.environ.setdefault("LOG_LEVEL", "WARNING")

from hypersketch.core.config import SketchConfig
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import Hypergraph
from hypersketch.services.hypergraph.generators import planted_cliques, random_hypergraph

FIXTURES = Path(__file__).parent / "fixtures"
TEST_SEED = bytes(range(32))


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def small_config() -> SketchConfig:
    """n=6 with few repetitions: every sketch operation stays fast."""
    return SketchConfig(n=6, m_max=16, r_max=3, c_l0=1, max_repetitions=8)


@pytest.fixture()
def prf() -> Prf:
    return Prf(TEST_SEED, "tests")


@pytest.fixture()
def other_prf() -> Prf:
    return Prf(bytes(reversed(range(32))), "tests")


@pytest.fixture()
def triangle() -> Hypergraph:
    return Hypergraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture()
def path4() -> Hypergraph:
    return Hypergraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture()
def joined_triangles() -> Hypergraph:
    """Two triangles {0,1,2}, {3,4,5} joined by the single bridge 2-3."""
    return Hypergraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


@pytest.fixture()
def k4() -> Hypergraph:
    return Hypergraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture()
def single_hyperedge() -> Hypergraph:
    return Hypergraph.from_edges(4, [(0, 1, 2, 3)])


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture()
def random_instances():
    """Factory: count seeded random hypergraphs with n in [3, max_n]."""

    def make(count: int, max_n: int = 6, max_m: int = 10, max_r: int = 4, seed: int = 7):
        gen = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            n = int(gen.integers(3, max_n + 1))
            out.append(random_hypergraph(gen, n, int(gen.integers(1, max_m + 1)), min(max_r, n)))
        return out

    return make


@pytest.fixture()
def planted() -> Hypergraph:
    return planted_cliques(np.random.default_rng(3), 9, r_max=3, transversals=3)

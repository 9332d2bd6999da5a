"""Seeded random instances for tests and selftest."""

import math
from typing import List, Sequence

import numpy as np

from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph
from hypersketch.schemas.stream import StreamUpdate


def random_edge(rng: np.random.Generator, n: int, r_max: int) -> Hyperedge:
    arity = int(rng.integers(2, r_max + 1))
    vertices = rng.choice(n, size=arity, replace=False)
    return Hyperedge.from_vertices(int(v) for v in vertices)


def random_hypergraph(rng: np.random.Generator, n: int, m: int, r_max: int,
                      max_weight: int = 1) -> Hypergraph:
    """m edge draws; repeated draws add weight, so parallel edges occur."""
    H = Hypergraph(n, r_max=r_max)
    for _ in range(m):
        H.add_edge(random_edge(rng, n, r_max), int(rng.integers(1, max_weight + 1)))
    return H


def planted_cliques(rng: np.random.Generator, n: int, r_max: int = 2,
                    transversals: int = 2) -> Hypergraph:
    """Disjoint cliques of size about sqrt(n) plus a few sparse hyperedges across them."""
    size = max(2, math.isqrt(n))
    order = [int(v) for v in rng.permutation(n)]
    cliques = [order[i:i + size] for i in range(0, n, size)]
    if len(cliques) > 1 and len(cliques[-1]) < 2:
        cliques[-2] += cliques.pop()
    H = Hypergraph(n, r_max=r_max)
    for clique in cliques:
        for i, u in enumerate(clique):
            for v in clique[i + 1:]:
                H.add_edge((u, v))
    for _ in range(transversals):
        picks = [int(rng.choice(c)) for c in cliques]
        if len(picks) < 2:
            break
        arity = min(r_max, len(picks))
        chosen = rng.choice(len(picks), size=arity, replace=False)
        H.add_edge(Hyperedge.from_vertices(picks[int(i)] for i in chosen))
    return H


def dynamic_stream(rng: np.random.Generator, H: Hypergraph, deletion_rate: float = 0.3,
                   r_max: int = 2) -> List[StreamUpdate]:
    """Inserts every copy of H plus decoy edges that are later deleted; deletions make up deletion_rate of the stream."""
    updates: List[StreamUpdate] = []
    for e, w in H.items():
        updates += [StreamUpdate.insert(e)] * w
    if not 0 <= deletion_rate < 0.5:
        raise ValueError(f"deletion_rate must lie in [0, 1/2), got {deletion_rate}")
    # decoys / (len(updates) + 2 * decoys) == deletion_rate
    decoys = math.ceil(deletion_rate * len(updates) / (1 - 2 * deletion_rate))
    inserts = [StreamUpdate.insert(random_edge(rng, H.n, r_max)) for _ in range(decoys)]
    order = [int(i) for i in rng.permutation(len(updates) + len(inserts))]
    pool = updates + inserts
    stream = [pool[i] for i in order]
    # each decoy is deleted somewhere after its insertion
    for u in inserts:
        at = next(i for i, x in enumerate(stream) if x is u) + 1
        stream.insert(int(rng.integers(at, len(stream) + 1)), StreamUpdate.delete(u.edge))
    return stream


def random_shards(rng: np.random.Generator, items: Sequence, k: int) -> List[list]:
    shards: List[list] = [[] for _ in range(k)]
    for item in items:
        shards[int(rng.integers(k))].append(item)
    return shards

"""
Cut evaluation and contraction over Hypergraph / Partition.
"""

from fractions import Fraction
from typing import Dict, List, Tuple

from hypersketch.core.errors import VertexOutOfRangeError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition


def canonical_id(e: Hyperedge, n: int) -> int:
    """Characteristic bitmask of e as an unbounded integer."""
    if e.max_vertex >= n:
        raise VertexOutOfRangeError(e.max_vertex, n)
    return e.mask


def crosses(edge_mask: int, block_mask: int) -> bool:
    """True when the edge has vertices both inside and outside the block."""
    return bool(edge_mask & block_mask) and bool(edge_mask & ~block_mask)


def crossing_edges(H: Hypergraph, P: Partition) -> Dict[Hyperedge, int]:
    """Edges not contained in a single block of P (P may cover a subset)."""
    index = P.block_index()
    out = {}
    for e, w in H.edges.items():
        first = index.get(e.vertices[0])
        if first is None or any(index.get(v) != first for v in e.vertices[1:]):
            out[e] = w
    return out


def cut_value(H: Hypergraph, P: Partition) -> Tuple[int, Fraction]:
    """(crossing weight, crossing weight / (k - 1))."""
    P.require_cover(H.n, min_blocks=2)
    crossing = sum(crossing_edges(H, P).values())
    return crossing, Fraction(crossing, P.k - 1)


def contract(H: Hypergraph, P: Partition) -> Hypergraph:
    """H/(V_1..V_k): block i becomes vertex i, self-loops dropped, weights add."""
    P.require_cover(H.n)
    index = P.block_index()
    out = Hypergraph(P.k)
    for e, w in H.edges.items():
        image = P.contracted_block_of(e, index)
        if image is not None:
            out.add_edge(image, w)
    return out


def contraction_map(H: Hypergraph, P: Partition) -> Dict[Hyperedge, List[Hyperedge]]:
    """Contracted edge -> original edges mapping onto it."""
    index = P.block_index()
    out: Dict[Hyperedge, List[Hyperedge]] = {}
    for e in H.edges:
        image = P.contracted_block_of(e, index)
        if image is not None:
            out.setdefault(image, []).append(e)
    return out

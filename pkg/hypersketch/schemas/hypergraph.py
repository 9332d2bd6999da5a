"""
Hypergraph domain types: canonical hyperedges, weighted multisets of them,
and vertex partitions.
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from hypersketch.core.errors import (
    ArityError, NegativeMultiplicityError, PartitionError, VertexOutOfRangeError,
)


@dataclass(frozen=True, slots=True, order=True)
class Hyperedge:
    """A set of at least two vertices, stored strictly increasing."""

    vertices: Tuple[int, ...]
    mask: int = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        vs = tuple(self.vertices)
        if len(vs) < 2:
            raise ArityError(f"hyperedge needs at least 2 vertices, got {vs}")
        if vs[0] < 0:
            raise ArityError(f"negative vertex id in {vs}")
        for a, b in zip(vs, vs[1:]):
            if a >= b:
                raise ArityError(f"hyperedge vertices must be strictly increasing: {vs}")
        object.__setattr__(self, "vertices", vs)
        mask = 0
        for v in vs:
            mask |= 1 << v
        object.__setattr__(self, "mask", mask)

    @classmethod
    def of(cls, *vertices: int) -> "Hyperedge":
        return cls.from_vertices(vertices)

    @classmethod
    def from_vertices(cls, vertices: Iterable[int]) -> "Hyperedge":
        return cls(tuple(sorted(set(int(v) for v in vertices))))

    @classmethod
    def from_id(cls, edge_id: int, n: Optional[int] = None) -> "Hyperedge":
        """Inverse of canonical_id."""
        if edge_id <= 0:
            raise ArityError(f"edge id {edge_id} encodes no vertices")
        if n is not None and edge_id >> n:
            raise VertexOutOfRangeError(edge_id.bit_length() - 1, n)
        vs = []
        v = 0
        rest = edge_id
        while rest:
            if rest & 1:
                vs.append(v)
            rest >>= 1
            v += 1
        return cls(tuple(vs))

    @property
    def arity(self) -> int:
        return len(self.vertices)

    @property
    def max_vertex(self) -> int:
        return self.vertices[-1]

    def validate(self, n: int, r_max: Optional[int] = None) -> "Hyperedge":
        if self.vertices[-1] >= n:
            raise VertexOutOfRangeError(self.vertices[-1], n)
        if r_max is not None and len(self.vertices) > r_max:
            raise ArityError(f"hyperedge {self} has arity {len(self.vertices)} > r_max={r_max}")
        return self

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and v >= 0 and bool(self.mask >> v & 1)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.vertices)


EdgeLike = Union[Hyperedge, Sequence[int]]


def as_edge(e: EdgeLike) -> Hyperedge:
    return e if isinstance(e, Hyperedge) else Hyperedge.from_vertices(e)


class Hypergraph:
    """Vertex count plus a multiset of hyperedges (edge -> positive integer weight)."""

    __slots__ = ("n", "r_max", "_edges")

    def __init__(self, n: int, edges: Union[Mapping[EdgeLike, int], Iterable[EdgeLike], None] = None,
                 r_max: Optional[int] = None):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        self.n = n
        self.r_max = r_max
        self._edges: Dict[Hyperedge, int] = {}
        if edges is None:
            return
        if isinstance(edges, Mapping):
            for e, w in edges.items():
                self.add_edge(e, w)
        else:
            for e in edges:
                self.add_edge(e)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], r_max: Optional[int] = None) -> "Hypergraph":
        return cls(n, [tuple(e) for e in edges], r_max=r_max)

    # ─── Mutation ───

    def add_edge(self, e: EdgeLike, weight: int = 1) -> Hyperedge:
        edge = as_edge(e).validate(self.n, self.r_max)
        if not isinstance(weight, int) or isinstance(weight, bool):
            raise ValueError(f"edge weight must be an integer, got {weight!r}")
        total = self._edges.get(edge, 0) + weight
        if total < 0:
            raise NegativeMultiplicityError(edge, total)
        if total == 0:
            self._edges.pop(edge, None)
        else:
            self._edges[edge] = total
        return edge

    def remove_edge(self, e: EdgeLike, weight: Optional[int] = None) -> Hyperedge:
        edge = as_edge(e)
        return self.add_edge(edge, -(self._edges.get(edge, 0) if weight is None else weight))

    # ─── Queries ───

    @property
    def edges(self) -> Mapping[Hyperedge, int]:
        return MappingProxyType(self._edges)

    def weight(self, e: EdgeLike) -> int:
        return self._edges.get(as_edge(e), 0)

    def items(self) -> List[Tuple[Hyperedge, int]]:
        return sorted(self._edges.items())

    @property
    def total_weight(self) -> int:
        return sum(self._edges.values())

    @property
    def distinct_edges(self) -> int:
        return len(self._edges)

    def induced(self, vertices: Iterable[int]) -> "Hypergraph":
        """H[S]: keeps only edges fully inside S; vertex ids unchanged."""
        mask = 0
        for v in vertices:
            mask |= 1 << v
        sub = Hypergraph(self.n, r_max=self.r_max)
        sub._edges = {e: w for e, w in self._edges.items() if e.mask & ~mask == 0}
        return sub

    def union(self, other: "Hypergraph") -> "Hypergraph":
        """Multiset sum of two hypergraphs on the same vertex set."""
        if other.n != self.n:
            raise ValueError(f"cannot join hypergraphs on {self.n} and {other.n} vertices")
        out = self.copy()
        for e, w in other._edges.items():
            out.add_edge(e, w)
        return out

    __add__ = union

    def scaled(self, factor: int) -> "Hypergraph":
        if factor < 0:
            raise ValueError("scale factor must be non-negative")
        out = Hypergraph(self.n, r_max=self.r_max)
        if factor:
            out._edges = {e: w * factor for e, w in self._edges.items()}
        return out

    def copy(self) -> "Hypergraph":
        out = Hypergraph(self.n, r_max=self.r_max)
        out._edges = dict(self._edges)
        return out

    def __contains__(self, e: object) -> bool:
        try:
            return as_edge(e) in self._edges  # type: ignore[arg-type]
        except (ArityError, VertexOutOfRangeError, TypeError):
            return False

    def __iter__(self) -> Iterator[Hyperedge]:
        return iter(sorted(self._edges))

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, distinct={len(self._edges)}, weight={self.total_weight})"


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty vertex blocks. As a k-cut it must cover [0, n) with k >= 2."""

    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        seen: set = set()
        for b in blocks:
            if not b:
                raise PartitionError("partition blocks must be nonempty")
            if seen & b:
                raise PartitionError(f"partition blocks overlap on {sorted(seen & b)}")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(frozenset((v,)) for v in range(n)))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls((frozenset(range(n)),))

    @classmethod
    def from_labels(cls, labels: Sequence[int], vertices: Optional[Sequence[int]] = None) -> "Partition":
        vertices = list(range(len(labels))) if vertices is None else list(vertices)
        groups: Dict[int, List[int]] = {}
        for v, label in zip(vertices, labels):
            groups.setdefault(label, []).append(v)
        return cls(tuple(frozenset(groups[k]) for k in sorted(groups)))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def covered(self) -> FrozenSet[int]:
        out: set = set()
        for b in self.blocks:
            out |= b
        return frozenset(out)

    def is_cover(self, n: int) -> bool:
        return self.covered() == frozenset(range(n))

    def require_cover(self, n: int, min_blocks: int = 1) -> None:
        if not self.is_cover(n):
            raise PartitionError(f"partition does not cover [0, {n})")
        if self.k < min_blocks:
            raise PartitionError(f"partition needs at least {min_blocks} blocks, got {self.k}")

    def block_index(self) -> Dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def block_masks(self) -> List[int]:
        masks = []
        for b in self.blocks:
            m = 0
            for v in b:
                m |= 1 << v
            masks.append(m)
        return masks

    def contracted_block_of(self, e: EdgeLike, index: Optional[Dict[int, int]] = None) -> Optional[Hyperedge]:
        """Image of e in the contracted hypergraph, None when e sits inside one block."""
        index = self.block_index() if index is None else index
        blocks = {index[v] for v in as_edge(e).vertices}
        if len(blocks) < 2:
            return None
        return Hyperedge(tuple(sorted(blocks)))

    def canonical_key(self) -> Tuple[Tuple[int, ...], ...]:
        """Blocks sorted by smallest member; used for lexicographic comparison."""
        return tuple(sorted(tuple(sorted(b)) for b in self.blocks))

    def canonical(self) -> "Partition":
        return Partition.from_blocks(self.canonical_key())

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[FrozenSet[int]]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return " | ".join(",".join(str(v) for v in block) for block in self.canonical_key())

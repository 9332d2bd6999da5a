"""
Decoder outputs: strength decompositions, strong-component schedules and
the weighted sparsifier itself.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple

from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition


@dataclass
class DecompositionResult:
    """Components T (singletons or strong) and the crossing edges S found while building them."""

    components: List[FrozenSet[int]]
    crossing_edges: Dict[Hyperedge, int]
    complete: bool = True
    rounds: int = 0
    merges: int = 0

    @property
    def partition(self) -> Partition:
        return Partition.from_blocks(sorted(self.components, key=min))

    def nontrivial(self) -> List[FrozenSet[int]]:
        return [c for c in self.components if len(c) > 1]


@dataclass
class StrongComponentSchedule:
    """Preprocessing partitions, one per connectivity stage (index 0 is the least sampled)."""

    n: int
    partitions: List[Partition]
    stable: List[bool] = field(default_factory=list)

    def partition_at(self, index: int) -> Partition:
        """Partition at a connectivity stage; past the deepest stage every vertex stands alone."""
        if 0 <= index < len(self.partitions):
            return self.partitions[index]
        return Partition.singletons(self.n)

    def base_partition(self, stage: int, offset: int) -> Partition:
        return self.partition_at(stage + offset)

    def __len__(self) -> int:
        return len(self.partitions)


class SparsifierEntry(NamedTuple):
    edge: Hyperedge
    weight: int
    stage: int
    copy: int = 0


@dataclass
class SparsifierOutput:
    n: int
    r_max: int
    eps: Fraction
    eps_star: Fraction
    entries: List[SparsifierEntry] = field(default_factory=list)
    seed_commitment: str = ""
    size_bound: Optional[int] = None
    _next_copy: Dict[Hyperedge, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def add(self, edge: Hyperedge, weight: int, stage: int, copy: Optional[int] = None) -> None:
        """Append an entry; without an explicit copy label the edge gets its next free one."""
        if copy is None:
            copy = self._next_copy.get(edge, 0)
        self._next_copy[edge] = max(self._next_copy.get(edge, 0), copy + 1)
        self.entries.append(SparsifierEntry(edge, weight, stage, copy))

    def as_hypergraph(self) -> Hypergraph:
        H = Hypergraph(self.n, r_max=self.r_max)
        for entry in self.entries:
            H.add_edge(entry.edge, entry.weight)
        return H

    def edges(self) -> List[Hyperedge]:
        return [entry.edge for entry in self.entries]

    def stages(self) -> Dict[int, int]:
        """stage -> number of edges emitted at that stage."""
        out: Dict[int, int] = {}
        for entry in self.entries:
            out[entry.stage] = out.get(entry.stage, 0) + 1
        return out

    def sorted_entries(self) -> List[SparsifierEntry]:
        return sorted(self.entries, key=lambda x: (x.stage, x.edge, x.copy))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[SparsifierEntry]:
        return iter(self.entries)

    def within_size_bound(self, slack: int = 1) -> Tuple[bool, int]:
        bound = self.size_bound if self.size_bound is not None else 0
        return len(self.entries) <= slack * bound, bound

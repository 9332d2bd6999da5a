"""
Recovery results: per-block verdicts, the credited-edge map and diagnostics.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

from hypersketch.schemas.hypergraph import Hyperedge, Partition


class BlockVerdict(str, Enum):
    EXHAUSTED = "exhausted"
    SATURATED = "saturated"
    INCOMPLETE = "incomplete"


def size_class(count: int) -> int:
    """floor(log2(count)), with 0 for empty counts."""
    return max(0, count.bit_length() - 1)


@dataclass
class RecoveryDiagnostics:
    """Counters for one recovery pass; observability only."""

    by_class: Counter = field(default_factory=Counter)
    per_level: Dict[int, int] = field(default_factory=dict)
    opened: int = 0
    empty: int = 0
    failed_samples: int = 0
    inconsistent: int = 0
    tail_certified: int = 0

    def record_level(self, level: int, new_edges: int) -> None:
        self.per_level[level] = self.per_level.get(level, 0) + new_edges

    def classify(self, partition: Partition, recovered: Dict[Hyperedge, int]) -> None:
        """Bucket recovered edges by (degree class of lowest incident block, crossing class)."""
        masks = partition.block_masks()
        degree = [0] * len(masks)
        touched: Dict[Hyperedge, List[int]] = {}
        for e in recovered:
            hits = [i for i, m in enumerate(masks) if e.mask & m]
            touched[e] = hits
            for i in hits:
                degree[i] += 1
        for e, hits in touched.items():
            d = size_class(degree[hits[0]]) if hits else 0
            self.by_class[(d, size_class(len(hits)))] += 1

    def dump(self) -> str:
        lines = [f"recovery d={d} j={j} count={c}" for (d, j), c in sorted(self.by_class.items())]
        lines += [f"level {lvl} new={c}" for lvl, c in sorted(self.per_level.items(), reverse=True)]
        lines.append(
            f"opened={self.opened} empty={self.empty} failed={self.failed_samples} "
            f"inconsistent={self.inconsistent} tail_certified={self.tail_certified}"
        )
        return "\n".join(lines)


@dataclass
class RecoveryOutcome:
    """Result of one recovery pass over a partition.

    `recovered` holds the edges found in this pass (edge -> multiplicity);
    `credits` maps each credited edge to the index of its representative block.
    """

    partition: Partition
    verdicts: List[BlockVerdict]
    recovered: Dict[Hyperedge, int]
    credits: Dict[Hyperedge, int]
    threshold: int
    diagnostics: RecoveryDiagnostics = field(default_factory=RecoveryDiagnostics)

    def credited_count(self, block: int) -> int:
        return sum(1 for b in self.credits.values() if b == block)

    def blocks_with(self, verdict: BlockVerdict) -> List[int]:
        return [i for i, v in enumerate(self.verdicts) if v is verdict]

    @property
    def exhausted(self) -> List[int]:
        return self.blocks_with(BlockVerdict.EXHAUSTED)

    @property
    def saturated(self) -> List[int]:
        return self.blocks_with(BlockVerdict.SATURATED)

    @property
    def incomplete(self) -> List[int]:
        return self.blocks_with(BlockVerdict.INCOMPLETE)

    def summary(self) -> Tuple[int, int, int]:
        return len(self.exhausted), len(self.saturated), len(self.incomplete)

"""
Vertex-incidence encoding and the PRF coins that decide where an edge lands.

Row v of the encoding holds, at coordinate e, +1 when v is a non-maximal
member of e and -(|e| - 1) when v is its maximal member. Coefficients over
an edge sum to zero, so summing rows over a vertex set cancels internal edges.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from hypersketch.core.prf import Prf, encode_parts, trailing_ones
from hypersketch.schemas.hypergraph import Hyperedge

FINGERPRINT_WORD_BYTES = 2


@dataclass(frozen=True)
class EncodedCoordinate:
    edge_id: int
    coefficients: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, edge_id: int, vertices: Sequence[int]) -> "EncodedCoordinate":
        return cls(edge_id, tuple(incidence_coefficients(vertices)))

    def over(self, component: Iterable[int]) -> int:
        """Summed coefficient over a vertex set; nonzero iff the set splits the edge."""
        members = set(component)
        return sum(c for v, c in self.coefficients if v in members)


def incidence_coefficients(vertices: Sequence[int]) -> List[Tuple[int, int]]:
    if len(vertices) < 2:
        return []
    ordered = sorted(vertices)
    return [(v, 1) for v in ordered[:-1]] + [(ordered[-1], -(len(ordered) - 1))]


def coefficient_over(vertices: Sequence[int], component_mask: int) -> int:
    """Sum of incidence coefficients of `vertices` restricted to a vertex mask."""
    if len(vertices) < 2:
        return 0
    top = max(vertices)
    total = 0
    for v in vertices:
        if component_mask >> v & 1:
            total += -(len(vertices) - 1) if v == top else 1
    return total


class StageFilter:
    """Nested rate-1/2 filters: e survives to stage i iff f_1(e) = ... = f_i(e) = 1."""

    def __init__(self, prf: Prf, stages: int):
        self.prf = prf
        self.stages = stages
        self.depth = lru_cache(maxsize=1 << 16)(self._depth)

    def _depth(self, edge_id: int) -> int:
        """Deepest stage containing the edge (stage 0 holds everything)."""
        word = self.prf.word(encode_parts(edge_id), 64)
        return min(self.stages - 1, trailing_ones(word))

    def admits(self, edge_id: int, stage: int) -> bool:
        return stage <= self.depth(edge_id)


class FingerprintCoins:
    """Per-(stage, repetition) vertex coins.

    Level coins nest: a vertex kept at level l is kept at every level below.
    Rate coins are fresh for each (level, rate); rate index q keeps a vertex
    with probability 2^-q.
    """

    def __init__(self, prf: Prf, levels: int, rates: int):
        self.prf = prf
        self.levels = levels
        self.rates = rates
        self.subsets = lru_cache(maxsize=1 << 16)(self._subsets)

    def _subsets(self, stage: int, rep: int, edge: Hyperedge) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """(level, rate) -> fingerprinted vertex tuple, for tuples of size >= 2."""
        a = edge.arity
        words_needed = a * (1 + self.levels * self.rates)
        raw = self.prf.digest(encode_parts(stage, rep, edge.mask), FINGERPRINT_WORD_BYTES * words_needed)
        w = FINGERPRINT_WORD_BYTES
        words = [int.from_bytes(raw[w * i:w * i + w], "little") for i in range(words_needed)]
        nest = [min(self.levels - 1, trailing_ones(words[j])) for j in range(a)]
        out: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        idx = a
        for level in range(self.levels):
            for q in range(self.rates):
                kept = tuple(
                    v for j, v in enumerate(edge.vertices)
                    if nest[j] >= level and (q == 0 or trailing_ones(words[idx + j]) >= q)
                )
                idx += a
                if len(kept) >= 2:
                    out[(level, q)] = kept
        return out

    def subset(self, stage: int, level: int, rate: int, rep: int, edge: Hyperedge) -> Tuple[int, ...]:
        return self.subsets(stage, rep, edge).get((level, rate), ())

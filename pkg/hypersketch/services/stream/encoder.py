"""
Dynamic-stream encoder.

Updates are folded into a buffer of net deltas per edge, which is flushed
into the sketch bundle in canonical order. The sketch is linear, so the
bytes depend only on the final multiset, never on arrival order or flush
points.
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import EdgeBudgetExceededError, NegativeMultiplicityError
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import EdgeLike, Hyperedge, Hypergraph, as_edge
from hypersketch.schemas.stream import StreamUpdate
from hypersketch.services.incidence.bundle import SketchBundle

logger = logging.getLogger("hypersketch.stream")

DEFAULT_BUFFER_LIMIT = 1024

StreamItem = Union[StreamUpdate, EdgeLike]


def update_delta(item: StreamItem) -> Tuple[Hyperedge, int]:
    """(edge, delta) of a stream update; a bare edge counts as one insert."""
    if isinstance(item, StreamUpdate):
        return item.edge, item.delta
    return as_edge(item), 1


def live_total(multiset: Dict[Hyperedge, int]) -> int:
    """Edges counted with multiplicity; lenient transients below zero count as none."""
    return sum(w for w in multiset.values() if w > 0)


def check_budget(multiset: Dict[Hyperedge, int], config: SketchConfig) -> None:
    total = live_total(multiset)
    if total > config.m_max:
        raise EdgeBudgetExceededError(total, config.m_max)


def unit_updates(shards: Sequence[Iterable[StreamItem]], config: SketchConfig) -> List[StreamUpdate]:
    """Every update of every shard as single inserts/deletes, in shard order.

    Raises EdgeBudgetExceededError when the final multiset over all shards
    holds more than m_max edges counted with multiplicity.
    """
    multiset: Dict[Hyperedge, int] = {}
    out: List[StreamUpdate] = []
    for shard in shards:
        for item in shard:
            edge, delta = update_delta(item)
            edge.validate(config.n, config.r_max)
            multiset[edge] = multiset.get(edge, 0) + delta
            step = StreamUpdate.insert(edge) if delta > 0 else StreamUpdate.delete(edge)
            out.extend([step] * abs(delta))
    check_budget(multiset, config)
    return out


class StreamEncoder:
    """Applies insert/delete updates to a SketchBundle.

    strict: reject any update that drives an edge's multiplicity below zero.
    The running multiset is tracked to enforce that and the m_max budgets:
    distinct edges at every step, edges counted with multiplicity at finish.
    """

    def __init__(self, config: SketchConfig, prf: Prf, strict: bool = True,
                 buffer_limit: int = DEFAULT_BUFFER_LIMIT):
        self.config = config
        self.prf = prf
        self.strict = strict
        self.buffer_limit = max(1, buffer_limit)
        self.bundle = SketchBundle.empty(config, prf)
        self.multiset: Dict[Hyperedge, int] = {}
        self._pending: Dict[Hyperedge, int] = {}
        self.updates_seen = 0

    def apply(self, update: StreamUpdate) -> None:
        self.update(update.edge, update.delta)

    def update(self, e: EdgeLike, delta: int) -> None:
        edge = as_edge(e).validate(self.config.n, self.config.r_max)
        total = self.multiset.get(edge, 0) + delta
        if self.strict and total < 0:
            raise NegativeMultiplicityError(edge, total)
        if total == 0:
            self.multiset.pop(edge, None)
        else:
            self.multiset[edge] = total
        if len(self.multiset) > self.config.m_max:
            raise EdgeBudgetExceededError(len(self.multiset), self.config.m_max)
        net = self._pending.get(edge, 0) + delta
        if net:
            self._pending[edge] = net
        else:
            self._pending.pop(edge, None)
        self.updates_seen += 1
        if len(self._pending) >= self.buffer_limit:
            self.flush()

    def extend(self, updates: Iterable[StreamUpdate]) -> "StreamEncoder":
        for u in updates:
            self.apply(u)
        return self

    def flush(self) -> None:
        if not self._pending:
            return
        logger.debug(f"Flushing {len(self._pending)} buffered edges after {self.updates_seen} updates")
        for edge, delta in sorted(self._pending.items()):
            self.bundle.encode_update(edge, delta)
        self._pending.clear()

    def finish(self) -> SketchBundle:
        self.flush()
        check_budget(self.multiset, self.config)
        logger.info(f"Encoded {self.updates_seen} updates; {len(self.multiset)} distinct edges remain "
                    f"({live_total(self.multiset)} with multiplicity)")
        return self.bundle

    def hypergraph(self) -> Hypergraph:
        """The current multiset (lenient mode may hold negative entries, which are skipped)."""
        return Hypergraph(self.config.n, {e: w for e, w in self.multiset.items() if w > 0},
                          r_max=self.config.r_max)


def stream_encode(updates: Iterable[StreamUpdate], config: SketchConfig, prf: Prf,
                  strict: bool = True, buffer_limit: Optional[int] = None) -> SketchBundle:
    encoder = StreamEncoder(config, prf, strict=strict, buffer_limit=buffer_limit or DEFAULT_BUFFER_LIMIT)
    return encoder.extend(updates).finish()

"""
SamplerBank: per-vertex l0-samplers over the fingerprinted incidence encoding.

Slot (stage, level, rate, rep) holds one sampler per vertex. An edge lands in
the slot when the stage filter admits it and its fingerprint at
(level, rate, rep) keeps at least two vertices; vertex v of the fingerprint
then receives coefficient(v) * delta at coordinate e. Parallel copies share
the coordinate, so a multiplicity is the coordinate's value. Summing a
component's samplers leaves exactly the edges whose fingerprint it splits.

Each stage also keeps an unfingerprinted sparse-recovery "tail" sketch per
vertex, which lets level-0 recovery certify that a block has no crossing
edges left.
"""

import logging
import threading
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import BankFormatError
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import EdgeLike, Hyperedge, as_edge
from hypersketch.services.incidence.encoding import (
    FingerprintCoins, StageFilter, coefficient_over, incidence_coefficients,
)
from hypersketch.services.incidence.vertex_bank import Key, VertexBank
from hypersketch.services.sketch.codec import Reader, put_uint
from hypersketch.services.sketch.l0_sampler import L0Sampler, Route, SamplerSeeds
from hypersketch.services.sketch.sparse_recovery import SparseRecoverySeeds, SparseRecoverySketch

logger = logging.getLogger("hypersketch.incidence")

Slot = Tuple[int, int, int, int]


class SamplerLayout:
    """All seeded randomness of a SamplerBank, derived once per (config, seed)."""

    _shared: Dict[Tuple[bytes, bytes], "SamplerLayout"] = {}
    _shared_lock = threading.Lock()

    @classmethod
    def shared(cls, config: SketchConfig, prf: Prf) -> "SamplerLayout":
        """One layout per (config, seed) per process; banks decoded from bytes reuse it."""
        key = (config.config_hash(), prf.commitment() + prf.tag.encode("utf-8"))
        with cls._shared_lock:
            layout = cls._shared.get(key)
            if layout is None:
                layout = cls._shared[key] = cls(config, prf)
            return layout

    def __init__(self, config: SketchConfig, prf: Prf):
        self.config = config
        root = prf.child("sampler-bank")
        self.root = root
        self.stage_filter = StageFilter(root.child("filter"), config.stages)
        self.coins = FingerprintCoins(root.child("fingerprint"), config.fingerprint_levels, config.rates)
        self.repetitions = config.recovery_repetitions
        self._slot_seeds: Dict[Slot, SamplerSeeds] = {}
        self._tail_seeds: Dict[int, SparseRecoverySeeds] = {}
        self.route = lru_cache(maxsize=1 << 16)(self._route)

    def seeds(self, slot: Slot) -> SamplerSeeds:
        seeds = self._slot_seeds.get(slot)
        if seeds is None:
            stage, level, rate, rep = slot
            seeds = self._slot_seeds[slot] = SamplerSeeds(
                self.root.child("slot", stage, level, rate, rep),
                self.config.sampler_levels,
                self.config.l0_repetitions,
            )
        return seeds

    def _route(self, slot: Slot, edge_id: int) -> Route:
        return self.seeds(slot).route(edge_id)

    @property
    def tail_enabled(self) -> bool:
        return self.config.tail_enabled

    def tail_seeds(self, stage: int) -> SparseRecoverySeeds:
        seeds = self._tail_seeds.get(stage)
        if seeds is None:
            seeds = self._tail_seeds[stage] = SparseRecoverySeeds(
                self.root.child("tail", stage),
                self.config.tail_sparsity,
                self.config.sparse_recovery_cap,
            )
        return seeds

    def plausible_id(self, stage: int):
        """Predicate for ids a stage-`stage` sampler could legitimately hold."""
        n, r_max = self.config.n, self.config.r_max
        admits = self.stage_filter.admits

        def check(edge_id: int) -> bool:
            if edge_id <= 0 or edge_id >> n:
                return False
            return 2 <= bin(edge_id).count("1") <= r_max and admits(edge_id, stage)

        return check


class SamplerBank(VertexBank):
    MAGIC = b"HSSB"
    KEY_WIDTHS = (1, 1, 1, 2, 2)

    def __init__(self, config: SketchConfig, prf: Prf, layout: Optional[SamplerLayout] = None):
        super().__init__(config, prf)
        self.layout = layout or SamplerLayout.shared(config, prf)
        self.tails: Dict[Tuple[int, int], SparseRecoverySketch] = {}
        # None means every stage; a stage view holds exactly one
        self.stages_held: Optional[FrozenSet[int]] = None

    def seeds_for(self, slot: Key) -> SamplerSeeds:
        return self.layout.seeds(slot)  # type: ignore[arg-type]

    def _empty_like(self) -> "SamplerBank":
        out = SamplerBank(self.config, self.prf, self.layout)
        out.stages_held = self.stages_held
        return out

    # ─── Encoding ───

    def encode_update(self, e: EdgeLike, delta: int, stages: Optional[Iterable[int]] = None) -> "SamplerBank":
        """Add delta copies of e to every slot that admits it (restricted to `stages` if given)."""
        edge = as_edge(e).validate(self.config.n, self.config.r_max)
        if delta == 0:
            return self
        layout = self.layout
        allowed = self._allowed_stages(stages)
        depth = layout.stage_filter.depth(edge.mask)
        for stage in range(depth + 1):
            if allowed is not None and stage not in allowed:
                continue
            for rep in range(layout.repetitions):
                for (level, rate), kept in layout.coins.subsets(stage, rep, edge).items():
                    slot = (stage, level, rate, rep)
                    route = layout.route(slot, edge.mask)
                    for v, c in incidence_coefficients(kept):
                        self._apply(slot, v, route, c * delta)
            if layout.tail_enabled:
                for v, c in incidence_coefficients(edge.vertices):
                    self._tail_update(stage, v, edge.mask, c * delta)
        return self

    def _allowed_stages(self, stages: Optional[Iterable[int]]) -> Optional[FrozenSet[int]]:
        if stages is None:
            return self.stages_held
        wanted = frozenset(stages)
        return wanted if self.stages_held is None else wanted & self.stages_held

    def _tail_update(self, stage: int, vertex: int, edge_id: int, delta: int) -> None:
        key = (stage, vertex)
        sketch = self.tails.get(key)
        if sketch is None:
            sketch = self.tails[key] = SparseRecoverySketch(self.layout.tail_seeds(stage))
        sketch.update(edge_id, delta)
        if sketch.is_zero():
            del self.tails[key]

    def remove_recovered(self, edges: Union[Mapping[Hyperedge, int], Iterable[EdgeLike]],
                         stages: Optional[Iterable[int]] = None) -> "SamplerBank":
        """Subtract recovered edges (with multiplicities when given a mapping)."""
        stage_list = None if stages is None else list(stages)
        items = edges.items() if isinstance(edges, Mapping) else ((e, 1) for e in edges)
        for e, mult in items:
            self.encode_update(e, -mult, stage_list)
        return self

    # ─── Component sums ───

    def component_sampler(self, stage: int, level: int, rate: int, rep: int,
                          component: Iterable[int]) -> L0Sampler:
        return self.component_sum((stage, level, rate, rep), component)

    def component_tail(self, stage: int, component: Iterable[int]) -> Optional[SparseRecoverySketch]:
        if not self.layout.tail_enabled:
            return None
        out = SparseRecoverySketch(self.layout.tail_seeds(stage))
        for v in component:
            sketch = self.tails.get((stage, v))
            if sketch is not None:
                out += sketch
        return out

    def identify(self, stage: int, edge_id: int, value: int, component_mask: int,
                 fingerprint: Optional[Tuple[int, int, int]] = None) -> Optional[Tuple[Hyperedge, int]]:
        """Map a decoded (id, value) back to (edge, multiplicity), or None if inconsistent.

        `fingerprint` is (level, rate, rep) for sampler decodes; None for tail decodes.
        """
        if not self.layout.plausible_id(stage)(edge_id):
            return None
        edge = Hyperedge.from_id(edge_id, self.config.n)
        if fingerprint is None:
            kept = edge.vertices
        else:
            level, rate, rep = fingerprint
            kept = self.layout.coins.subset(stage, level, rate, rep, edge)
        c = coefficient_over(kept, component_mask)
        if c == 0 or value % c:
            return None
        mult = value // c
        if mult <= 0:
            return None
        return edge, mult

    # ─── Views ───

    def stage_view(self, stage: int) -> "SamplerBank":
        """Deep copy of a single stage; subtraction on it never touches other stages."""
        out = SamplerBank(self.config, self.prf, self.layout)
        out.stages_held = frozenset((stage,))
        out.samplers = {k: s.copy() for k, s in self.samplers.items() if k[0] == stage}
        out.tails = {k: t.copy() for k, t in self.tails.items() if k[0] == stage}
        return out

    def stage_population(self, stage: int) -> int:
        """Number of stored samplers and tails at one stage (diagnostics)."""
        return sum(1 for k in self.samplers if k[0] == stage) + sum(1 for k in self.tails if k[0] == stage)

    # ─── Hooks ───

    def _extra_empty(self, stages=None) -> bool:
        if stages is None:
            return not self.tails
        return not any(k[0] in stages for k in self.tails)

    def _merge_extra(self, other: "SamplerBank") -> None:  # type: ignore[override]
        for key, sketch in other.tails.items():
            mine = self.tails.get(key)
            if mine is None:
                self.tails[key] = sketch.copy()
            else:
                mine += sketch
                if mine.is_zero():
                    del self.tails[key]

    def _clone_extra(self, out: "SamplerBank", vertex: Optional[int]) -> None:  # type: ignore[override]
        out.tails = {k: t.copy() for k, t in self.tails.items() if vertex is None or k[1] == vertex}

    def _check_key(self, key: Key) -> None:
        super()._check_key(key)
        stage, level, rate, rep, _ = key
        c = self.config
        if stage >= c.stages or level >= c.fingerprint_levels or rate >= c.rates or rep >= c.recovery_repetitions:
            raise BankFormatError(f"sampler slot {key[:-1]} outside the configured layout")

    def _write_extra(self, buf: bytearray) -> None:
        put_uint(buf, len(self.tails), 4)
        for stage, vertex in sorted(self.tails):
            put_uint(buf, stage, 1)
            put_uint(buf, vertex, 2)
            self.tails[(stage, vertex)].write(buf)

    def _read_extra(self, reader: Reader) -> None:
        count = reader.uint(4)
        if count and not self.layout.tail_enabled:
            raise BankFormatError("bank carries tail sketches but the config disables them")
        for _ in range(count):
            stage = reader.uint(1)
            vertex = reader.uint(2)
            if stage >= self.config.stages or vertex >= self.config.n:
                raise BankFormatError(f"tail sketch ({stage}, {vertex}) outside the configured layout")
            self.tails[(stage, vertex)] = SparseRecoverySketch.read(self.layout.tail_seeds(stage), reader)

"""
ConnectivityBank: the preprocessing sketch used to find strong components.

Stage i keeps the edges surviving i independent rate-1/2 halvings. Each
(stage, round) holds one unfingerprinted l0-sampler per vertex sized for
poly(n) support; round r is spent on the r-th spanning-forest merge.
"""

import threading
from typing import Dict, Iterable, Optional, Tuple

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import BankFormatError
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import EdgeLike, as_edge
from hypersketch.services.incidence.encoding import StageFilter, incidence_coefficients
from hypersketch.services.incidence.vertex_bank import Key, VertexBank
from hypersketch.services.sketch.l0_sampler import L0Sampler, SamplerSeeds


class ConnectivityLayout:
    _shared: Dict[Tuple[bytes, bytes], "ConnectivityLayout"] = {}
    _shared_lock = threading.Lock()

    @classmethod
    def shared(cls, config: SketchConfig, prf: Prf) -> "ConnectivityLayout":
        key = (config.config_hash(), prf.commitment() + prf.tag.encode("utf-8"))
        with cls._shared_lock:
            layout = cls._shared.get(key)
            if layout is None:
                layout = cls._shared[key] = cls(config, prf)
            return layout

    def __init__(self, config: SketchConfig, prf: Prf):
        self.config = config
        self.root = prf.child("connectivity-bank")
        self.stages = config.connectivity_stages
        self.rounds = config.connectivity_rounds
        self.stage_filter = StageFilter(self.root.child("filter"), self.stages)
        self._seeds: Dict[Tuple[int, int], SamplerSeeds] = {}

    def seeds(self, stage: int, round_index: int) -> SamplerSeeds:
        key = (stage, round_index)
        seeds = self._seeds.get(key)
        if seeds is None:
            seeds = self._seeds[key] = SamplerSeeds(
                self.root.child("slot", stage, round_index),
                self.config.connectivity_levels,
                self.config.l0_repetitions,
            )
        return seeds

    def plausible_id(self, stage: int):
        n, r_max = self.config.n, self.config.r_max
        admits = self.stage_filter.admits

        def check(edge_id: int) -> bool:
            if edge_id <= 0 or edge_id >> n:
                return False
            return 2 <= bin(edge_id).count("1") <= r_max and admits(edge_id, stage)

        return check


class ConnectivityBank(VertexBank):
    MAGIC = b"HSCB"
    KEY_WIDTHS = (1, 2, 2)

    def __init__(self, config: SketchConfig, prf: Prf, layout: Optional[ConnectivityLayout] = None):
        super().__init__(config, prf)
        self.layout = layout or ConnectivityLayout.shared(config, prf)

    @property
    def stages(self) -> int:
        return self.layout.stages

    @property
    def rounds(self) -> int:
        return self.layout.rounds

    def seeds_for(self, slot: Key) -> SamplerSeeds:
        return self.layout.seeds(*slot)

    def _empty_like(self) -> "ConnectivityBank":
        return ConnectivityBank(self.config, self.prf, self.layout)

    def encode_update(self, e: EdgeLike, delta: int, stages: Optional[Iterable[int]] = None) -> "ConnectivityBank":
        edge = as_edge(e).validate(self.config.n, self.config.r_max)
        if delta == 0:
            return self
        allowed = None if stages is None else frozenset(stages)
        coefficients = incidence_coefficients(edge.vertices)
        depth = self.layout.stage_filter.depth(edge.mask)
        for stage in range(depth + 1):
            if allowed is not None and stage not in allowed:
                continue
            for r in range(self.rounds):
                slot = (stage, r)
                route = self.layout.seeds(stage, r).route(edge.mask)
                for v, c in coefficients:
                    self._apply(slot, v, route, c * delta)
        return self

    def component_sampler(self, stage: int, round_index: int, component: Iterable[int]) -> L0Sampler:
        return self.component_sum((stage, round_index), component)

    def _check_key(self, key: Key) -> None:
        super()._check_key(key)
        stage, round_index, _ = key
        if stage >= self.stages or round_index >= self.rounds:
            raise BankFormatError(f"connectivity slot {key[:-1]} outside the configured layout")

"""
SketchBundle: the SamplerBank and ConnectivityBank built from one edge multiset.

It is the unit written to bank files and exchanged between MPC machines.
Wire format: b"HSKB" | version u16 | blob(sampler bank) | blob(connectivity bank)
"""

import logging
from typing import Iterable, Optional

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import BankFormatError, ConfigMismatchError, EdgeBudgetExceededError
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import EdgeLike, Hypergraph, as_edge
from hypersketch.services.incidence.connectivity_bank import ConnectivityBank
from hypersketch.services.incidence.sampler_bank import SamplerBank
from hypersketch.services.incidence.vertex_bank import FORMAT_VERSION
from hypersketch.services.sketch.codec import Reader, put_bytes, put_uint

logger = logging.getLogger("hypersketch.incidence")

BUNDLE_MAGIC = b"HSKB"


class SketchBundle:
    def __init__(self, sampler_bank: SamplerBank, conn_bank: ConnectivityBank):
        if sampler_bank.config != conn_bank.config:
            raise ConfigMismatchError("sampler and connectivity banks disagree on config")
        self.sampler_bank = sampler_bank
        self.conn_bank = conn_bank

    @classmethod
    def empty(cls, config: SketchConfig, prf: Prf) -> "SketchBundle":
        return cls(SamplerBank(config, prf), ConnectivityBank(config, prf))

    @classmethod
    def of_hypergraph(cls, H: Hypergraph, config: SketchConfig, prf: Prf) -> "SketchBundle":
        if H.total_weight > config.m_max:
            raise EdgeBudgetExceededError(H.total_weight, config.m_max)
        bundle = cls.empty(config, prf)
        for e, w in H.items():
            bundle.encode_update(e, w)
        return bundle

    @property
    def config(self) -> SketchConfig:
        return self.sampler_bank.config

    @property
    def prf(self) -> Prf:
        return self.sampler_bank.prf

    def encode_update(self, e: EdgeLike, delta: int) -> "SketchBundle":
        edge = as_edge(e)
        self.sampler_bank.encode_update(edge, delta)
        self.conn_bank.encode_update(edge, delta)
        return self

    def __iadd__(self, other: "SketchBundle") -> "SketchBundle":
        self.sampler_bank += other.sampler_bank
        self.conn_bank += other.conn_bank
        return self

    def __add__(self, other: "SketchBundle") -> "SketchBundle":
        out = self.clone()
        out += other
        return out

    def clone(self) -> "SketchBundle":
        return SketchBundle(self.sampler_bank.clone(), self.conn_bank.clone())

    def vertex_fragment(self, vertex: int) -> "SketchBundle":
        return SketchBundle(self.sampler_bank.vertex_fragment(vertex), self.conn_bank.vertex_fragment(vertex))

    def vertices(self) -> Iterable[int]:
        return sorted(set(self.sampler_bank.vertices()) | set(self.conn_bank.vertices())
                      | {v for _, v in self.sampler_bank.tails})

    def is_empty(self) -> bool:
        return self.sampler_bank.is_empty() and self.conn_bank.is_empty()

    # ─── Serialization ───

    def to_bytes(self) -> bytes:
        buf = bytearray(BUNDLE_MAGIC)
        put_uint(buf, FORMAT_VERSION, 2)
        put_bytes(buf, self.sampler_bank.to_bytes())
        put_bytes(buf, self.conn_bank.to_bytes())
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes, prf: Prf, expect: Optional[SketchConfig] = None) -> "SketchBundle":
        reader = Reader(data)
        magic = reader.take(len(BUNDLE_MAGIC))
        if magic != BUNDLE_MAGIC:
            raise BankFormatError(f"not a bank file (magic {magic!r})")
        version = reader.uint(2)
        if version != FORMAT_VERSION:
            raise BankFormatError(f"unsupported bank file version {version}")
        sampler_bank = SamplerBank.from_bytes(reader.blob(), prf)
        conn_bank = ConnectivityBank.from_bytes(reader.blob(), prf)
        reader.expect_end()
        if expect is not None and sampler_bank.config != expect:
            raise ConfigMismatchError("bank file was built with a different config")
        return cls(sampler_bank, conn_bank)

    def byte_size(self) -> int:
        return len(self.to_bytes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SketchBundle):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()


def merge_bundles(bundles: Iterable[SketchBundle]) -> SketchBundle:
    it = iter(bundles)
    first = next(it, None)
    if first is None:
        raise ValueError("nothing to merge")
    out = first.clone()
    for b in it:
        out += b
    return out

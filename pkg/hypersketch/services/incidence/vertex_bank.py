"""
Shared machinery for per-vertex sampler banks: keyed storage, linear
combination, fragments and the versioned binary format.

Header: magic(4) | version u16 | config JSON blob | config hash(32) | seed commitment(32)
Body:   u32 count, then (key fields, sampler) in sorted key order; zero samplers are omitted.
"""

import hashlib
import logging
from typing import Dict, Iterable, Iterator, Optional, Tuple, Type, TypeVar

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import BankFormatError, ConfigMismatchError
from hypersketch.core.prf import Prf
from hypersketch.services.sketch.codec import Reader, put_bytes, put_uint
from hypersketch.services.sketch.l0_sampler import L0Sampler, Route, SamplerSeeds

logger = logging.getLogger("hypersketch.incidence")

FORMAT_VERSION = 1

Key = Tuple[int, ...]
B = TypeVar("B", bound="VertexBank")


def write_header(buf: bytearray, magic: bytes, config: SketchConfig, prf: Prf) -> None:
    buf += magic
    put_uint(buf, FORMAT_VERSION, 2)
    put_bytes(buf, config.canonical_json().encode("utf-8"))
    buf += config.config_hash()
    buf += prf.commitment()


def read_header(reader: Reader, magic: bytes, prf: Prf) -> SketchConfig:
    found = reader.take(len(magic))
    if found != magic:
        raise BankFormatError(f"bad magic {found!r}, expected {magic!r}")
    version = reader.uint(2)
    if version != FORMAT_VERSION:
        raise BankFormatError(f"unsupported bank format version {version}")
    raw_config = reader.blob()
    config_hash = reader.take(32)
    commitment = reader.take(32)
    if hashlib.sha256(raw_config).digest() != config_hash:
        raise BankFormatError("config hash does not match embedded config")
    try:
        config = SketchConfig.from_json(raw_config.decode("utf-8"))
    except ValueError as e:
        raise BankFormatError(f"invalid embedded config: {e}") from e
    if commitment != prf.commitment():
        raise ConfigMismatchError("bank was built with a different master seed")
    return config


class VertexBank:
    """Samplers keyed by (slot fields..., vertex). Subclasses define the slot layout."""

    MAGIC = b"VBNK"
    KEY_WIDTHS: Tuple[int, ...] = (2,)

    def __init__(self, config: SketchConfig, prf: Prf):
        self.config = config
        self.prf = prf
        self.samplers: Dict[Key, L0Sampler] = {}

    # ─── Slot layout (subclass hooks) ───

    def seeds_for(self, slot: Key) -> SamplerSeeds:
        raise NotImplementedError

    def _empty_like(self: B) -> B:
        raise NotImplementedError

    # ─── Storage ───

    def _apply(self, slot: Key, vertex: int, route: Route, delta: int) -> None:
        key = slot + (vertex,)
        sampler = self.samplers.get(key)
        if sampler is None:
            sampler = self.samplers[key] = L0Sampler(self.seeds_for(slot))
        sampler.apply(route, delta)
        if sampler.is_zero():
            del self.samplers[key]

    def sampler(self, slot: Key, vertex: int) -> L0Sampler:
        return self.samplers.get(slot + (vertex,)) or L0Sampler(self.seeds_for(slot))

    def component_sum(self, slot: Key, component: Iterable[int]) -> L0Sampler:
        out = L0Sampler(self.seeds_for(slot))
        for v in component:
            s = self.samplers.get(slot + (v,))
            if s is not None:
                out += s
        return out

    def is_empty(self, stages: Optional[Iterable[int]] = None) -> bool:
        if stages is None:
            return not self.samplers and self._extra_empty()
        wanted = set(stages)
        return not any(k[0] in wanted for k in self.samplers) and self._extra_empty(wanted)

    def _extra_empty(self, stages=None) -> bool:
        return True

    # ─── Linear structure ───

    def check_compatible(self, other: "VertexBank") -> None:
        if type(self) is not type(other):
            raise ConfigMismatchError(f"cannot merge {type(self).__name__} with {type(other).__name__}")
        if self.config.config_hash() != other.config.config_hash():
            raise ConfigMismatchError("banks were built with different configs")
        if self.prf.commitment() != other.prf.commitment():
            raise ConfigMismatchError("banks were built with different master seeds")

    def __iadd__(self: B, other: B) -> B:
        self.check_compatible(other)
        for key, sampler in other.samplers.items():
            mine = self.samplers.get(key)
            if mine is None:
                self.samplers[key] = sampler.copy()
            else:
                mine += sampler
                if mine.is_zero():
                    del self.samplers[key]
        self._merge_extra(other)
        return self

    def _merge_extra(self, other: "VertexBank") -> None:
        pass

    def clone(self: B) -> B:
        out = self._empty_like()
        out.samplers = {k: s.copy() for k, s in self.samplers.items()}
        self._clone_extra(out, None)
        return out

    def _clone_extra(self, out: "VertexBank", vertex: Optional[int]) -> None:
        pass

    def vertex_fragment(self: B, vertex: int) -> B:
        """The part of the bank owned by one vertex (its rows)."""
        out = self._empty_like()
        out.samplers = {k: s.copy() for k, s in self.samplers.items() if k[-1] == vertex}
        self._clone_extra(out, vertex)
        return out

    def vertices(self) -> Iterator[int]:
        return iter(sorted({k[-1] for k in self.samplers}))

    # ─── Serialization ───

    def to_bytes(self) -> bytes:
        buf = bytearray()
        write_header(buf, self.MAGIC, self.config, self.prf)
        put_uint(buf, len(self.samplers), 4)
        for key in sorted(self.samplers):
            for field, width in zip(key, self.KEY_WIDTHS):
                put_uint(buf, field, width)
            self.samplers[key].write(buf)
        self._write_extra(buf)
        return bytes(buf)

    def _write_extra(self, buf: bytearray) -> None:
        pass

    @classmethod
    def from_bytes(cls: Type[B], data: bytes, prf: Prf) -> B:
        reader = Reader(data)
        bank = cls.read(reader, prf)
        reader.expect_end()
        return bank

    @classmethod
    def read(cls: Type[B], reader: Reader, prf: Prf) -> B:
        config = read_header(reader, cls.MAGIC, prf)
        bank = cls(config, prf)
        count = reader.uint(4)
        for _ in range(count):
            key = tuple(reader.uint(w) for w in cls.KEY_WIDTHS)
            bank._check_key(key)
            bank.samplers[key] = L0Sampler.read(bank.seeds_for(key[:-1]), reader)
        bank._read_extra(reader)
        return bank

    def _check_key(self, key: Key) -> None:
        if key[-1] >= self.config.n:
            raise BankFormatError(f"sampler key {key} names vertex outside n={self.config.n}")

    def _read_extra(self, reader: Reader) -> None:
        pass

    def byte_size(self) -> int:
        return len(self.to_bytes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexBank):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()

"""
l0-sampler by geometric subsampling.

Each repetition nests `levels` testers; an id lands in levels 0..top where
top counts the leading coin flips of its level word (rate 2^-j at level j).
Sampling returns the unique surviving id of the deepest nonempty level of
the first repetition where that level is 1-sparse.
"""

from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from hypersketch.core.config import FIELD_PRIME
from hypersketch.core.errors import BankFormatError
from hypersketch.core.prf import Prf, encode_parts, trailing_ones
from hypersketch.schemas.hypergraph import Hyperedge
from hypersketch.services.sketch.codec import Reader, put_uint
from hypersketch.services.sketch.one_sparse import (
    HASH_BYTES, IdCheck, OneSparseTester, TesterSeeds, Verdict,
)

LEVEL_WORD_BYTES = 4


class Route(NamedTuple):
    """Where one id lands in every repetition of a sampler family."""

    edge_id: int
    tops: Tuple[int, ...]
    powers: Tuple[int, ...]


class SamplerSeeds:
    """Randomness shared by every sampler of one family (identical seeds => summable)."""

    __slots__ = ("prf", "levels", "repetitions", "testers")

    def __init__(self, prf: Prf, levels: int, repetitions: int):
        if levels < 1 or repetitions < 1:
            raise ValueError("sampler needs at least one level and one repetition")
        self.prf = prf
        self.levels = levels
        self.repetitions = repetitions
        hash_prf = prf.child("route")
        self.testers = [
            TesterSeeds(1 + prf.uniform(encode_parts("z", r), FIELD_PRIME - 1), hash_prf)
            for r in range(repetitions)
        ]

    def route(self, edge_id: int) -> Route:
        raw = self.testers[0].hash_prf.digest(
            encode_parts(edge_id), HASH_BYTES + LEVEL_WORD_BYTES * self.repetitions
        )
        h = int.from_bytes(raw[:HASH_BYTES], "little")
        cap = self.levels - 1
        tops = []
        for r in range(self.repetitions):
            start = HASH_BYTES + LEVEL_WORD_BYTES * r
            word = int.from_bytes(raw[start:start + LEVEL_WORD_BYTES], "little")
            tops.append(min(cap, trailing_ones(word)))
        powers = tuple(pow(t.z, h, FIELD_PRIME) for t in self.testers)
        return Route(edge_id, tuple(tops), powers)

    def fingerprint(self) -> Tuple[str, int, int]:
        return self.prf.tag, self.levels, self.repetitions


class L0Sampler:
    """Sparse map (repetition, level) -> tester; zero testers are never stored."""

    __slots__ = ("seeds", "cells")

    def __init__(self, seeds: SamplerSeeds):
        self.seeds = seeds
        self.cells: Dict[Tuple[int, int], OneSparseTester] = {}

    def apply(self, route: Route, delta: int) -> "L0Sampler":
        if delta == 0:
            return self
        cells = self.cells
        for r, top in enumerate(route.tops):
            power = route.powers[r]
            for j in range(top + 1):
                key = (r, j)
                tester = cells.get(key)
                if tester is None:
                    tester = cells[key] = OneSparseTester()
                tester.add(route.edge_id, delta, power)
                if tester.is_zero():
                    del cells[key]
        return self

    def update(self, e: Union[Hyperedge, int], delta: int) -> "L0Sampler":
        edge_id = e.mask if isinstance(e, Hyperedge) else int(e)
        return self.apply(self.seeds.route(edge_id), delta)

    def tester(self, rep: int, level: int) -> OneSparseTester:
        return self.cells.get((rep, level)) or OneSparseTester()

    def sample(self, valid_id: Optional[IdCheck] = None) -> Optional[Tuple[int, int]]:
        if not self.cells:
            return None
        for r in range(self.seeds.repetitions):
            tseeds = self.seeds.testers[r]
            for j in range(self.seeds.levels - 1, -1, -1):
                tester = self.cells.get((r, j))
                if tester is None:
                    continue
                decoded = tester.decode(tseeds, valid_id)
                if decoded.verdict is Verdict.ONE_SPARSE:
                    return decoded.edge_id, decoded.weight
                # deeper levels were empty; shallower ones hold a superset
                break
        return None

    def is_zero(self) -> bool:
        return not self.cells

    # ─── Linear structure ───

    def _check_family(self, other: "L0Sampler") -> None:
        if self.seeds is not other.seeds and self.seeds.fingerprint() != other.seeds.fingerprint():
            raise ValueError("cannot combine samplers with different seeds")

    def __iadd__(self, other: "L0Sampler") -> "L0Sampler":
        self._check_family(other)
        cells = self.cells
        for key, tester in other.cells.items():
            mine = cells.get(key)
            if mine is None:
                cells[key] = tester.copy()
            else:
                mine += tester
                if mine.is_zero():
                    del cells[key]
        return self

    def __add__(self, other: "L0Sampler") -> "L0Sampler":
        return self.copy().__iadd__(other)

    def __neg__(self) -> "L0Sampler":
        out = L0Sampler(self.seeds)
        out.cells = {k: -t for k, t in self.cells.items()}
        return out

    def __sub__(self, other: "L0Sampler") -> "L0Sampler":
        return self + (-other)

    def copy(self) -> "L0Sampler":
        out = L0Sampler(self.seeds)
        out.cells = {k: t.copy() for k, t in self.cells.items()}
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, L0Sampler):
            return NotImplemented
        return self.cells == other.cells

    # ─── Serialization ───

    def write(self, buf: bytearray) -> None:
        put_uint(buf, len(self.cells), 4)
        for (r, j) in sorted(self.cells):
            put_uint(buf, r, 2)
            put_uint(buf, j, 1)
            self.cells[(r, j)].write(buf)

    @classmethod
    def read(cls, seeds: SamplerSeeds, reader: Reader) -> "L0Sampler":
        sampler = cls(seeds)
        count = reader.uint(4)
        for _ in range(count):
            r = reader.uint(2)
            j = reader.uint(1)
            if r >= seeds.repetitions or j >= seeds.levels:
                raise BankFormatError(f"sampler cell ({r}, {j}) outside layout")
            sampler.cells[(r, j)] = OneSparseTester.read(reader)
        return sampler

    def to_bytes(self) -> bytes:
        buf = bytearray()
        self.write(buf)
        return bytes(buf)

    @classmethod
    def from_bytes(cls, seeds: SamplerSeeds, data: bytes) -> "L0Sampler":
        reader = Reader(data)
        sampler = cls.read(seeds, reader)
        reader.expect_end()
        return sampler


def sum_samplers(samplers: List[L0Sampler], seeds: SamplerSeeds) -> L0Sampler:
    out = L0Sampler(seeds)
    for s in samplers:
        out += s
    return out


def l0_update(S: L0Sampler, e: Union[Hyperedge, int], delta: int) -> L0Sampler:
    return S.update(e, delta)


def l0_sample(S: L0Sampler, valid_id: Optional[IdCheck] = None) -> Optional[Tuple[int, int]]:
    return S.sample(valid_id)

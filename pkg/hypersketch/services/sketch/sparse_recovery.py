"""
s-sparse recovery with overflow detection.

State: syndromes S_j = sum x_i * b_i^j mod p for j = 0..2s (b_i = id), plus one
checkpoint evaluation sum x_i * w^h(i). Decoding solves the Hankel system for
the error-locator polynomial, factors it over GF(p), solves the Vandermonde
system for the values and re-checks every syndrome and the checkpoint.
Anything that fails the re-check is DENSE.
"""

import logging
from functools import lru_cache
from typing import Dict, List, Optional

import galois
import numpy as np

from hypersketch.core.config import FIELD_PRIME
from hypersketch.core.errors import ParameterError, SparsityCapExceededError
from hypersketch.core.prf import Prf, encode_parts
from hypersketch.services.sketch.codec import Reader, put_uint
from hypersketch.services.sketch.one_sparse import HASH_BYTES

logger = logging.getLogger("hypersketch.sketch")

DEFAULT_SPARSITY_CAP = 8
HALF_FIELD = FIELD_PRIME // 2


@lru_cache(maxsize=1)
def prime_field():
    return galois.GF(FIELD_PRIME)


def to_signed(value: int) -> int:
    value %= FIELD_PRIME
    return value - FIELD_PRIME if value > HALF_FIELD else value


class SparseRecoverySeeds:
    __slots__ = ("prf", "sparsity", "w")

    def __init__(self, prf: Prf, sparsity: int, cap: int = DEFAULT_SPARSITY_CAP):
        if sparsity < 1:
            raise ParameterError("sparsity must be positive")
        if sparsity > cap:
            raise SparsityCapExceededError(f"sparsity {sparsity} exceeds cap {cap}")
        self.prf = prf
        self.sparsity = sparsity
        self.w = 1 + prf.uniform(encode_parts("checkpoint"), FIELD_PRIME - 1)

    @property
    def width(self) -> int:
        return 2 * self.sparsity + 1

    def checkpoint_power(self, edge_id: int) -> int:
        h = int.from_bytes(self.prf.digest(encode_parts("c", edge_id), HASH_BYTES), "little")
        return pow(self.w, h, FIELD_PRIME)

    def fingerprint(self):
        return self.prf.tag, self.sparsity


class SparseRecoverySketch:
    __slots__ = ("seeds", "syndromes", "checkpoint")

    def __init__(self, seeds: SparseRecoverySeeds):
        self.seeds = seeds
        self.syndromes: List[int] = [0] * seeds.width
        self.checkpoint = 0

    def update(self, edge_id: int, delta: int) -> "SparseRecoverySketch":
        if not 0 < edge_id < FIELD_PRIME:
            raise ParameterError(f"id {edge_id} is not a usable field point")
        p = FIELD_PRIME
        syn = self.syndromes
        b = 1
        for j in range(len(syn)):
            syn[j] = (syn[j] + delta * b) % p
            b = b * edge_id % p
        self.checkpoint = (self.checkpoint + delta * self.seeds.checkpoint_power(edge_id)) % p
        return self

    def is_zero(self) -> bool:
        return self.checkpoint == 0 and not any(self.syndromes)

    # ─── Decoding ───

    def decode(self) -> Optional[Dict[int, int]]:
        """The exact vector {id: value} if s-sparse, else None (DENSE)."""
        if self.is_zero():
            return {}
        if not any(self.syndromes):
            return None
        for t in range(1, self.seeds.sparsity + 1):
            candidate = self._solve(t)
            if candidate is not None and self._consistent(candidate):
                return candidate
        return None

    def _solve(self, t: int) -> Optional[Dict[int, int]]:
        GF = prime_field()
        S = self.syndromes
        try:
            hankel = GF([[S[j + k] for k in range(t)] for j in range(1, t + 1)])
            rhs = -GF([S[j + t] for j in range(1, t + 1)])
            c = np.linalg.solve(hankel, rhs)
            locator = galois.Poly([1] + [int(c[k]) for k in reversed(range(t))], field=GF)
            factors, multiplicities = locator.factors()
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError):
            return None
        if any(m != 1 for m in multiplicities) or any(f.degree != 1 for f in factors):
            return None
        roots = [int(-f.coeffs[-1]) for f in factors]
        if len(roots) != t or 0 in roots:
            return None
        try:
            vandermonde = GF([[pow(b, j, FIELD_PRIME) for b in roots] for j in range(1, t + 1)])
            values = np.linalg.solve(vandermonde, GF([S[j] for j in range(1, t + 1)]))
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError):
            return None
        out = {}
        for b, v in zip(roots, values):
            value = to_signed(int(v))
            if value == 0:
                return None
            out[b] = value
        return out

    def _consistent(self, vector: Dict[int, int]) -> bool:
        rebuilt = SparseRecoverySketch(self.seeds)
        for edge_id, value in vector.items():
            rebuilt.update(edge_id, value)
        return rebuilt.syndromes == self.syndromes and rebuilt.checkpoint == self.checkpoint

    # ─── Linear structure ───

    def __iadd__(self, other: "SparseRecoverySketch") -> "SparseRecoverySketch":
        if self.seeds is not other.seeds and self.seeds.fingerprint() != other.seeds.fingerprint():
            raise ValueError("cannot combine sparse-recovery sketches with different seeds")
        p = FIELD_PRIME
        self.syndromes = [(a + b) % p for a, b in zip(self.syndromes, other.syndromes)]
        self.checkpoint = (self.checkpoint + other.checkpoint) % p
        return self

    def __add__(self, other: "SparseRecoverySketch") -> "SparseRecoverySketch":
        return self.copy().__iadd__(other)

    def __neg__(self) -> "SparseRecoverySketch":
        out = SparseRecoverySketch(self.seeds)
        out.syndromes = [(-s) % FIELD_PRIME for s in self.syndromes]
        out.checkpoint = (-self.checkpoint) % FIELD_PRIME
        return out

    def copy(self) -> "SparseRecoverySketch":
        out = SparseRecoverySketch(self.seeds)
        out.syndromes = list(self.syndromes)
        out.checkpoint = self.checkpoint
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseRecoverySketch):
            return NotImplemented
        return self.syndromes == other.syndromes and self.checkpoint == other.checkpoint

    # ─── Serialization ───

    def write(self, buf: bytearray) -> None:
        for s in self.syndromes:
            put_uint(buf, s, 8)
        put_uint(buf, self.checkpoint, 8)

    @classmethod
    def read(cls, seeds: SparseRecoverySeeds, reader: Reader) -> "SparseRecoverySketch":
        sketch = cls(seeds)
        sketch.syndromes = [reader.uint(8) for _ in range(seeds.width)]
        sketch.checkpoint = reader.uint(8)
        return sketch


def sparse_recover(S: SparseRecoverySketch) -> Optional[Dict[int, int]]:
    """{id: value} when the sketched vector is s-sparse, None (DENSE) otherwise."""
    return S.decode()

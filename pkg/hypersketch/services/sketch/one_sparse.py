"""
1-sparse recovery.

A tester keeps three linear accumulators over updates (id, delta):
    alpha = sum delta * id        (exact, unbounded)
    phi   = sum delta
    tau   = sum delta * z^h(id)   (mod p)
A single surviving coordinate satisfies tau == phi * z^h(alpha/phi).
"""

from enum import Enum
from typing import Callable, NamedTuple, Optional, Union

from hypersketch.core.config import FIELD_PRIME
from hypersketch.core.prf import Prf, encode_parts
from hypersketch.schemas.hypergraph import Hyperedge
from hypersketch.services.sketch.codec import Reader, put_bigint, put_uint

# Width of the seeded index map id -> h(id) feeding the tau exponent.
HASH_BYTES = 5

IdCheck = Callable[[int], bool]


class Verdict(str, Enum):
    EMPTY = "empty"
    ONE_SPARSE = "one_sparse"
    DENSE = "dense"


class Decoded(NamedTuple):
    verdict: Verdict
    edge_id: Optional[int] = None
    weight: int = 0


EMPTY = Decoded(Verdict.EMPTY)
DENSE = Decoded(Verdict.DENSE)


class TesterSeeds:
    """The random point z and the seeded index map shared by testers of one family."""

    __slots__ = ("z", "hash_prf")

    def __init__(self, z: int, hash_prf: Prf):
        if not 0 < z < FIELD_PRIME:
            raise ValueError("z must be a nonzero field element")
        self.z = z
        self.hash_prf = hash_prf

    @classmethod
    def from_prf(cls, prf: Prf) -> "TesterSeeds":
        z = 1 + prf.uniform(encode_parts("z"), FIELD_PRIME - 1)
        return cls(z, prf.child("route"))

    def hash_index(self, edge_id: int) -> int:
        return int.from_bytes(self.hash_prf.digest(encode_parts(edge_id), HASH_BYTES), "little")

    def power(self, edge_id: int) -> int:
        return pow(self.z, self.hash_index(edge_id), FIELD_PRIME)


class OneSparseTester:
    __slots__ = ("alpha", "phi", "tau")

    def __init__(self, alpha: int = 0, phi: int = 0, tau: int = 0):
        self.alpha = alpha
        self.phi = phi
        self.tau = tau % FIELD_PRIME

    def add(self, edge_id: int, delta: int, z_power: int) -> "OneSparseTester":
        self.alpha += delta * edge_id
        self.phi += delta
        self.tau = (self.tau + delta * z_power) % FIELD_PRIME
        return self

    def is_zero(self) -> bool:
        return self.alpha == 0 and self.phi == 0 and self.tau == 0

    def decode(self, seeds: TesterSeeds, valid_id: Optional[IdCheck] = None) -> Decoded:
        if self.is_zero():
            return EMPTY
        if self.phi == 0 or self.alpha % self.phi:
            return DENSE
        edge_id = self.alpha // self.phi
        if edge_id <= 0 or (valid_id is not None and not valid_id(edge_id)):
            return DENSE
        if self.tau != (self.phi * seeds.power(edge_id)) % FIELD_PRIME:
            return DENSE
        return Decoded(Verdict.ONE_SPARSE, edge_id, self.phi)

    # ─── Linear structure ───

    def __iadd__(self, other: "OneSparseTester") -> "OneSparseTester":
        self.alpha += other.alpha
        self.phi += other.phi
        self.tau = (self.tau + other.tau) % FIELD_PRIME
        return self

    def __add__(self, other: "OneSparseTester") -> "OneSparseTester":
        return self.copy().__iadd__(other)

    def __neg__(self) -> "OneSparseTester":
        return OneSparseTester(-self.alpha, -self.phi, -self.tau)

    def __sub__(self, other: "OneSparseTester") -> "OneSparseTester":
        return self + (-other)

    def copy(self) -> "OneSparseTester":
        return OneSparseTester(self.alpha, self.phi, self.tau)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneSparseTester):
            return NotImplemented
        return (self.alpha, self.phi, self.tau) == (other.alpha, other.phi, other.tau)

    def __repr__(self) -> str:
        return f"OneSparseTester(alpha={self.alpha}, phi={self.phi}, tau={self.tau})"

    # ─── Serialization ───

    def write(self, buf: bytearray) -> None:
        put_bigint(buf, self.alpha)
        put_bigint(buf, self.phi)
        put_uint(buf, self.tau, 8)

    @classmethod
    def read(cls, reader: Reader) -> "OneSparseTester":
        alpha = reader.bigint()
        phi = reader.bigint()
        tau = reader.uint(8)
        return cls(alpha, phi, tau)

    def to_bytes(self) -> bytes:
        buf = bytearray()
        self.write(buf)
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "OneSparseTester":
        reader = Reader(data)
        tester = cls.read(reader)
        reader.expect_end()
        return tester


def _edge_id(e: Union[Hyperedge, int]) -> int:
    return e.mask if isinstance(e, Hyperedge) else int(e)


def ost_update(t: OneSparseTester, e: Union[Hyperedge, int], delta: int,
               seeds: TesterSeeds) -> OneSparseTester:
    edge_id = _edge_id(e)
    return t.add(edge_id, delta, seeds.power(edge_id))


def ost_decode(t: OneSparseTester, seeds: TesterSeeds, valid_id: Optional[IdCheck] = None) -> Decoded:
    return t.decode(seeds, valid_id)

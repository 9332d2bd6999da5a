"""
Seeded pseudo-random function.
Every random choice in the sketch (stage filters, fingerprint coins, sampler
levels, field points) is a deterministic function of (master seed, tag, input).
"""

import hashlib
from fractions import Fraction
from typing import Union

SEED_BYTES = 32

Part = Union[int, str, bytes]


def encode_parts(*parts: Part) -> bytes:
    """Unambiguous byte encoding of a tuple of ints, strings and bytes."""
    out = bytearray()
    for part in parts:
        if isinstance(part, bool):
            part = int(part)
        if isinstance(part, int):
            raw = part.to_bytes(part.bit_length() // 8 + 1, "little", signed=True)
            out += b"i"
        elif isinstance(part, str):
            raw = part.encode("utf-8")
            out += b"s"
        elif isinstance(part, (bytes, bytearray)):
            raw = bytes(part)
            out += b"b"
        else:
            raise TypeError(f"cannot encode PRF input part of type {type(part).__name__}")
        out += len(raw).to_bytes(4, "little") + raw
    return bytes(out)


class Prf:
    """Keyed hash stream: same (seed, tag, input) always gives the same bytes."""

    __slots__ = ("master_seed", "tag", "_key")

    def __init__(self, master_seed: bytes, tag: str = "root"):
        if len(master_seed) != SEED_BYTES:
            raise ValueError(f"master seed must be {SEED_BYTES} bytes, got {len(master_seed)}")
        self.master_seed = bytes(master_seed)
        self.tag = tag
        self._key = hashlib.blake2b(tag.encode("utf-8"), key=self.master_seed, digest_size=32).digest()

    @classmethod
    def from_hex(cls, seed_hex: str, tag: str = "root") -> "Prf":
        return cls(bytes.fromhex(seed_hex), tag)

    def child(self, *parts: Part) -> "Prf":
        suffix = "/".join(str(p) for p in parts)
        return Prf(self.master_seed, f"{self.tag}/{suffix}")

    def digest(self, data: bytes, size: int) -> bytes:
        return hashlib.shake_256(self._key + data).digest(size)

    def word(self, data: bytes, bits: int = 64) -> int:
        """Uniform integer in [0, 2^bits)."""
        nbytes = (bits + 7) // 8
        value = int.from_bytes(self.digest(data, nbytes), "little")
        return value & ((1 << bits) - 1)

    def uniform(self, data: bytes, bound: int) -> int:
        """Integer in [0, bound); bias below 2^-64."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        nbytes = (bound.bit_length() + 64 + 7) // 8
        return int.from_bytes(self.digest(data, nbytes), "little") % bound

    def bit(self, data: bytes, rate: Fraction) -> int:
        rate = Fraction(rate)
        if rate < 0 or rate > 1:
            raise ValueError(f"rate must lie in [0, 1], got {rate}")
        if rate == 0:
            return 0
        if rate == 1:
            return 1
        u = self.word(data, 64)
        return int(u * rate.denominator < rate.numerator << 64)

    def commitment(self) -> bytes:
        """Public commitment to the master seed; stored in bank headers."""
        return hashlib.blake2b(b"hypersketch-seed-commitment" + self.master_seed, digest_size=32).digest()

    def __repr__(self) -> str:
        return f"Prf(tag={self.tag!r})"


def prf_bit(prf: Prf, data: bytes, rate: Fraction) -> int:
    """Deterministic Bernoulli(rate) bit."""
    return prf.bit(data, rate)


def trailing_ones(word: int) -> int:
    """Number of consecutive 1 bits from the least significant end."""
    return ((word ^ (word + 1)).bit_length()) - 1

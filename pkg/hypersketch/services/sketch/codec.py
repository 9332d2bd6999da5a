"""
Binary helpers: fixed-width little-endian fields, length-prefixed signed big integers.
"""

from hypersketch.core.errors import BankFormatError


def put_uint(buf: bytearray, value: int, width: int) -> None:
    buf += value.to_bytes(width, "little", signed=False)


def put_bigint(buf: bytearray, value: int) -> None:
    raw = value.to_bytes(value.bit_length() // 8 + 1, "little", signed=True)
    put_uint(buf, len(raw), 4)
    buf += raw


def put_bytes(buf: bytearray, data: bytes) -> None:
    put_uint(buf, len(data), 4)
    buf += data


class Reader:
    """Sequential reader over a bytes payload."""

    __slots__ = ("data", "offset")

    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.offset = offset

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if size < 0 or end > len(self.data):
            raise BankFormatError(f"truncated payload at byte {self.offset} (wanted {size})")
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def uint(self, width: int) -> int:
        return int.from_bytes(self.take(width), "little", signed=False)

    def bigint(self) -> int:
        size = self.uint(4)
        return int.from_bytes(self.take(size), "little", signed=True)

    def blob(self) -> bytes:
        return self.take(self.uint(4))

    @property
    def exhausted(self) -> bool:
        return self.offset >= len(self.data)

    def expect_end(self) -> None:
        if not self.exhausted:
            raise BankFormatError(f"{len(self.data) - self.offset} trailing bytes")

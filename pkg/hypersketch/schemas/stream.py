"""Dynamic stream updates."""

from dataclasses import dataclass
from enum import Enum
from hypersketch.schemas.hypergraph import Hyperedge


class UpdateOp(str, Enum):
    INSERT = "+"
    DELETE = "-"

    @property
    def sign(self) -> int:
        return 1 if self is UpdateOp.INSERT else -1


@dataclass(frozen=True)
class StreamUpdate:
    op: UpdateOp
    edge: Hyperedge

    @classmethod
    def insert(cls, edge: Hyperedge) -> "StreamUpdate":
        return cls(UpdateOp.INSERT, edge)

    @classmethod
    def delete(cls, edge: Hyperedge) -> "StreamUpdate":
        return cls(UpdateOp.DELETE, edge)

    @property
    def delta(self) -> int:
        return self.op.sign

"""MPC simulation state and reports."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from hypersketch.schemas.sparsifier import SparsifierOutput


@dataclass
class Message:
    source: int
    dest: int
    vertex: int
    payload: bytes

    @property
    def size(self) -> int:
        return len(self.payload)


@dataclass
class MachineState:
    """One machine: its budget, the per-vertex fragments it holds and this round's traffic."""

    machine_id: int
    memory_budget: int
    held: Dict[int, bytes] = field(default_factory=dict)
    inbox: List[Message] = field(default_factory=list)
    outbox: List[Message] = field(default_factory=list)

    @property
    def state_bytes(self) -> int:
        return sum(len(p) for p in self.held.values())

    @property
    def inbox_bytes(self) -> int:
        return sum(m.size for m in self.inbox)

    @property
    def outbox_bytes(self) -> int:
        return sum(m.size for m in self.outbox)

    def round_usage(self, state_bytes: int) -> int:
        return state_bytes + max(self.inbox_bytes, self.outbox_bytes)


@dataclass
class RoundStats:
    round_index: int
    messages: int
    traffic_bytes: int
    peak_memory: int
    busy_machines: int


@dataclass
class MpcReport:
    machines: int
    rounds: int
    expected_rounds: int
    peak_memory: int
    memory_budget: int
    round_stats: List[RoundStats] = field(default_factory=list)
    output: Optional[SparsifierOutput] = None
    coordinator_bank: bytes = field(default=b"", repr=False)
    schedule: str = ""
    shards: int = 0

    @property
    def rounds_match(self) -> bool:
        return self.rounds == self.expected_rounds

    def traffic(self) -> List[Tuple[int, int]]:
        return [(s.messages, s.traffic_bytes) for s in self.round_stats]

    def summary_lines(self) -> List[str]:
        lines = [
            f"machines {self.machines} schedule {self.schedule} shards {self.shards}",
            f"rounds {self.rounds} expected {self.expected_rounds}",
            f"peak_memory {self.peak_memory} budget {self.memory_budget}",
        ]
        lines += [
            f"round {s.round_index} messages={s.messages} bytes={s.traffic_bytes} "
            f"peak={s.peak_memory} busy={s.busy_machines}"
            for s in self.round_stats
        ]
        return lines

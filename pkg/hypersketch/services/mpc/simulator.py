"""
Simulated MPC merge of vertex-incidence sketches.

Every input update is split into single inserts and deletes, and those m
unit updates are packed in order onto k = ceil(m / n) machines holding n each.
Every machine encodes its own slice and splits the result into per-vertex
fragments. With k >= n machines the fragments of vertex v are folded through
groups of shrinking size ceil(k / n^l) until one machine holds each vertex,
then all vertices go to the coordinator. With k < n machine floor(v*k/n)
owns vertex v and the protocol takes exactly two rounds.

Messages are serialized SketchBundle fragments. Each round, a machine is
charged its held bytes plus the larger of its inbox and outbox.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import BudgetExceededError
from hypersketch.core.prf import Prf
from hypersketch.schemas.mpc import MachineState, Message, MpcReport, RoundStats
from hypersketch.schemas.stream import StreamUpdate
from hypersketch.services.incidence.bundle import SketchBundle, merge_bundles
from hypersketch.services.sparsify.pipeline import decode_bundle
from hypersketch.services.stream.encoder import StreamItem, unit_updates

logger = logging.getLogger("hypersketch.mpc")

COORDINATOR = 0

Router = Callable[[int, int], int]


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def expected_rounds(n: int, m: int) -> int:
    """max(2, ceil(log_n m)) in integer arithmetic."""
    t, reach = 0, 1
    while reach < m:
        reach *= n
        t += 1
    return max(2, t)


def group_sizes(n: int, k: int) -> List[int]:
    """ceil(k / n^l) for l = 1, 2, ... down to and including the first 1."""
    sizes, span = [], n
    while True:
        g = ceil_div(k, span)
        sizes.append(g)
        if g == 1:
            return sizes
        span *= n


def pack(updates: Sequence[StreamUpdate], n: int) -> List[List[StreamUpdate]]:
    """Consecutive slices of n updates, at least one (possibly empty) slice."""
    return [list(updates[i:i + n]) for i in range(0, len(updates), n)] or [[]]


def _encode_shard(shard: Iterable[StreamUpdate], config: SketchConfig, prf: Prf) -> SketchBundle:
    bundle = SketchBundle.empty(config, prf)
    for update in shard:
        bundle.encode_update(update.edge, update.delta)
    return bundle


def _fragments(bundle: SketchBundle) -> Dict[int, bytes]:
    return {v: bundle.vertex_fragment(v).to_bytes() for v in bundle.vertices()}


class MpcSimulator:
    def __init__(self, config: SketchConfig, prf: Prf, machines: int, memory_budget: int,
                 max_workers: Optional[int] = None):
        if machines < 1:
            raise ValueError("need at least one machine")
        self.config = config
        self.prf = prf
        self.k = machines
        self.memory_budget = memory_budget
        self.max_workers = max_workers
        n = config.n
        if machines >= n:
            self.groups = group_sizes(n, machines)
            self.schedule = "grouped"
            pool = max(machines, self.groups[0] * n)
        else:
            self.groups = []
            self.schedule = "owner"
            pool = machines
        self.machines = [MachineState(j, memory_budget) for j in range(pool)]
        self.round_stats: List[RoundStats] = []
        self.peak_memory = 0

    # ─── Routing ───

    def routers(self) -> List[Router]:
        """One routing function (machine, vertex) -> destination per communication round."""
        n, k = self.config.n, self.k
        if self.schedule == "owner":
            return [lambda j, v: v * k // n, lambda j, v: COORDINATOR]

        out: List[Router] = []
        previous: Optional[int] = None
        for g in self.groups:
            if previous is None:
                out.append(lambda j, v, g=g: g * v + (j % g))
            else:
                out.append(lambda j, v, g=g, p=previous: g * v + ((j - p * v) % g))
            previous = g
        out.append(lambda j, v: COORDINATOR)
        return out

    # ─── Rounds ───

    def _charge(self, round_index: int, usage: Dict[int, int]) -> int:
        peak = max(usage.values(), default=0)
        for j, used in sorted(usage.items()):
            if used > self.memory_budget:
                raise BudgetExceededError(round_index, j, used, self.memory_budget)
        self.peak_memory = max(self.peak_memory, peak)
        return peak

    def encode(self, shards: Sequence[Iterable[StreamUpdate]]) -> None:
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            bundles = list(pool.map(lambda s: _encode_shard(s, self.config, self.prf), shards))
        usage = {}
        for j, bundle in enumerate(bundles):
            machine = self.machines[j]
            machine.held = _fragments(bundle)
            usage[j] = machine.state_bytes
        peak = self._charge(0, usage)
        self.round_stats.append(RoundStats(0, 0, 0, peak, len(bundles)))
        logger.info(f"Encoded {len(bundles)} shards; largest local sketch {peak} bytes")

    def run_round(self, round_index: int, route: Router) -> None:
        for machine in self.machines:
            machine.outbox = [Message(machine.machine_id, route(machine.machine_id, v), v, payload)
                              for v, payload in sorted(machine.held.items())]
            machine.inbox = []
        # Barrier: every outbox is complete before anything is delivered.
        for machine in self.machines:
            for message in machine.outbox:
                self.machines[message.dest].inbox.append(message)

        usage = {m.machine_id: m.round_usage(m.state_bytes) for m in self.machines if m.held or m.inbox}
        peak = self._charge(round_index, usage)
        messages = sum(len(m.outbox) for m in self.machines)
        traffic = sum(m.outbox_bytes for m in self.machines)

        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            held = list(pool.map(self._absorb, self.machines))
        for machine, fragments in zip(self.machines, held):
            machine.held = fragments
            machine.outbox = []
        busy = sum(1 for m in self.machines if m.inbox)
        self.round_stats.append(RoundStats(round_index, messages, traffic, peak, busy))
        logger.debug(f"Round {round_index}: {messages} messages, {traffic} bytes, peak {peak}")

    def _absorb(self, machine: MachineState) -> Dict[int, bytes]:
        """Sum received fragments vertex by vertex."""
        by_vertex: Dict[int, List[bytes]] = {}
        for message in machine.inbox:
            by_vertex.setdefault(message.vertex, []).append(message.payload)
        out = {}
        for v, payloads in sorted(by_vertex.items()):
            if len(payloads) == 1:
                out[v] = payloads[0]
                continue
            merged = merge_bundles(SketchBundle.from_bytes(p, self.prf, expect=self.config) for p in payloads)
            if not merged.is_empty():
                out[v] = merged.to_bytes()
        return out

    def coordinator_bundle(self) -> SketchBundle:
        coordinator = self.machines[COORDINATOR]
        bundle = SketchBundle.empty(self.config, self.prf)
        for v in sorted(coordinator.held):
            bundle += SketchBundle.from_bytes(coordinator.held[v], self.prf, expect=self.config)
        return bundle

    def run(self, shards: Sequence[Iterable[StreamUpdate]]) -> SketchBundle:
        self.encode(shards)
        for round_index, route in enumerate(self.routers(), start=1):
            self.run_round(round_index, route)
        return self.coordinator_bundle()

    @property
    def rounds(self) -> int:
        return len(self.round_stats) - 1


def mpc_simulate(edge_shards: Sequence[Iterable[StreamItem]], config: SketchConfig, prf: Prf,
                 memory_budget: int, decode: bool = True, max_workers: Optional[int] = None) -> MpcReport:
    """Run the protocol over the updates in `edge_shards` and decode at the coordinator.

    Shards may be uneven and a shard may delete edges another one inserted;
    the updates are repacked n per machine before encoding. Raises
    BudgetExceededError naming the first round and machine over budget and
    EdgeBudgetExceededError when the final multiset holds more than m_max edges.
    """
    shards = [list(s) for s in edge_shards]
    if not shards:
        raise ValueError("mpc_simulate needs at least one shard")
    updates = unit_updates(shards, config)
    m = max(1, len(updates))
    packed = pack(updates, config.n)
    simulator = MpcSimulator(config, prf, len(packed), memory_budget, max_workers)
    logger.info(
        f"MPC over {len(packed)} machines ({simulator.schedule} schedule, {len(simulator.machines)} in pool) "
        f"from {len(shards)} shards, m={m}, budget {memory_budget} bytes"
    )
    bundle = simulator.run(packed)

    expected = expected_rounds(config.n, m)
    if simulator.rounds != expected:
        logger.error(
            f"Protocol took {simulator.rounds} rounds, formula gives {expected} "
            f"(k={len(packed)} machines for m={m} updates)"
        )
    report = MpcReport(
        machines=len(simulator.machines),
        rounds=simulator.rounds,
        expected_rounds=expected,
        peak_memory=simulator.peak_memory,
        memory_budget=memory_budget,
        round_stats=simulator.round_stats,
        coordinator_bank=bundle.to_bytes(),
        schedule=simulator.schedule,
        shards=len(shards),
    )
    if decode:
        report.output = decode_bundle(bundle)
    logger.info(f"MPC finished in {report.rounds} rounds, peak memory {report.peak_memory} bytes")
    return report

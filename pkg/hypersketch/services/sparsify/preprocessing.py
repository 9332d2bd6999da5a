"""
Strong-component preprocessing from the ConnectivityBank.

Stages are opened from the most heavily sampled down to stage 0. Each stage
starts from the components of the stage above and runs spanning-forest
rounds: every component sums its round-r samplers, samples one crossing edge
and is joined with every component that edge touches.
"""

import logging
from typing import List

from hypersketch.schemas.hypergraph import Hyperedge, Partition
from hypersketch.schemas.sparsifier import StrongComponentSchedule
from hypersketch.services.incidence.connectivity_bank import ConnectivityBank
from hypersketch.services.incidence.encoding import coefficient_over
from hypersketch.services.oracle.union_find import UnionFind

logger = logging.getLogger("hypersketch.sparsify")


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _connect_stage(conn_bank: ConnectivityBank, stage: int, start: Partition):
    """Components of the stage hypergraph contracted by `start`; (partition, stable, failures)."""
    uf = UnionFind(range(conn_bank.config.n))
    for block in start.blocks:
        uf.union_all(sorted(block))
    valid_id = conn_bank.layout.plausible_id(stage)
    failures = 0
    last_round = conn_bank.rounds - 1

    for r in range(conn_bank.rounds):
        components = uf.retrieve_components()
        live = 0
        for comp in components:
            sampler = conn_bank.component_sampler(stage, r, comp)
            if sampler.is_zero():
                continue
            live += 1
            sample = sampler.sample(valid_id)
            if sample is None:
                failures += 1
                continue
            edge_id, value = sample
            edge = Hyperedge.from_id(edge_id, conn_bank.config.n)
            c = coefficient_over(edge.vertices, _mask(comp))
            if c == 0 or value % c or value // c <= 0:
                failures += 1
                logger.warning(f"Connectivity stage {stage} round {r}: inconsistent decode skipped")
                continue
            uf.union_all(edge.vertices)
        if live == 0:
            return Partition.from_blocks(components), True, failures

    components = uf.retrieve_components()
    stable = all(conn_bank.component_sampler(stage, last_round, comp).is_zero() for comp in components)
    return Partition.from_blocks(components), stable, failures


def recover_strong_components(conn_bank: ConnectivityBank) -> StrongComponentSchedule:
    n = conn_bank.config.n
    partitions: List[Partition] = [Partition.singletons(n)] * conn_bank.stages
    stable: List[bool] = [True] * conn_bank.stages
    current = Partition.singletons(n)
    for stage in range(conn_bank.stages - 1, -1, -1):
        current, ok, failures = _connect_stage(conn_bank, stage, current)
        partitions[stage] = current
        stable[stage] = ok
        if not ok:
            logger.warning(
                f"Connectivity stage {stage}: samplers ran out before components stabilized "
                f"({failures} failed samples); keeping the finer partition"
            )
        else:
            logger.debug(f"Connectivity stage {stage}: {current.k} components")
    logger.info(f"Strong-component schedule over {conn_bank.stages} stages: "
                + ", ".join(str(p.k) for p in partitions))
    return StrongComponentSchedule(n, partitions, stable)

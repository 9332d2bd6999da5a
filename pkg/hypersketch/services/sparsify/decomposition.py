"""
Strength decomposition and conditional low-strength edge recovery for one stage.

Decomposition keeps active and retired components. Each round runs a full
recovery over the active ones. When fewer than half are exhausted, edges of
strength > 2 phi log n among everything recovered so far (computed exactly on
the contraction by the current components) merge the components they touch.
Otherwise the exhausted components retire.
"""

import logging
import math
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional

from hypersketch.core.errors import OracleCapExceededError, ParameterError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition
from hypersketch.schemas.sparsifier import DecompositionResult
from hypersketch.services.hypergraph.cuts import contract, contraction_map
from hypersketch.services.incidence.sampler_bank import SamplerBank
from hypersketch.services.oracle.exact_oracle import strength_recursive
from hypersketch.services.oracle.union_find import UnionFind
from hypersketch.services.recovery.iterative import recover

logger = logging.getLogger("hypersketch.sparsify")


def decomposition_rounds(log_n: int) -> int:
    return math.ceil(8 * log_n)


def _ordered(blocks) -> List[FrozenSet[int]]:
    return sorted((frozenset(b) for b in blocks), key=min)


def _strong_edges(S: Mapping[Hyperedge, int], components: List[FrozenSet[int]], n: int,
                  threshold: Fraction, cap: int) -> List[Hyperedge]:
    """Contracted edges (over component indices) whose strength exceeds `threshold`."""
    H = Hypergraph(n, dict(S))
    if H.total_weight <= threshold:
        # strength never exceeds total weight
        return []
    P = Partition.from_blocks(components)
    contracted = contract(H, P)
    if contracted.total_weight <= threshold:
        return []
    if contracted.n > cap:
        raise OracleCapExceededError(contracted.n, cap, "super-vertices in merge strength computation")
    strengths = strength_recursive(contracted, cap)
    return [e for e, s in strengths.items() if s > threshold]


def strength_decomposition(bank: SamplerBank, stage: int, phi: Fraction, base_partition: Partition,
                           already: Optional[Mapping[Hyperedge, int]] = None) -> DecompositionResult:
    config = bank.config
    base_partition.require_cover(config.n)
    phi = Fraction(phi)
    merge_threshold = 2 * phi * config.log_n
    rounds = decomposition_rounds(config.log_n)

    active = _ordered(base_partition.blocks)
    retired: List[FrozenSet[int]] = []
    S: Dict[Hyperedge, int] = dict(already or {})
    merges = 0
    used = 0

    for r in range(rounds):
        if not active:
            break
        used = r + 1
        outcome = recover(bank, stage, Partition(tuple(active)), S, phi)
        for e, mult in outcome.recovered.items():
            S[e] = S.get(e, 0) + mult
        exhausted = set(outcome.exhausted)

        if 2 * len(exhausted) < len(active):
            everything = _ordered(active + retired)
            strong = _strong_edges(S, everything, config.n, merge_threshold, config.oracle_vertex_cap)
            if not strong and not outcome.recovered:
                logger.warning(f"Stage {stage}: decomposition stalled at round {r} with {len(active)} active")
                break
            if strong:
                uf = UnionFind(range(len(everything)))
                for e in strong:
                    uf.union_all(e.vertices)
                groups = uf.retrieve_components()
                still_active = set(active)
                next_active, next_retired = [], []
                for group in groups:
                    members = [everything[i] for i in group]
                    if len(members) > 1:
                        merges += 1
                        next_active.append(frozenset().union(*members))
                    elif members[0] in still_active:
                        next_active.append(members[0])
                    else:
                        next_retired.append(members[0])
                active, retired = _ordered(next_active), _ordered(next_retired)
                logger.info(f"Stage {stage} round {r}: merged into {len(active)} active components")
        else:
            retiring = [active[i] for i in sorted(exhausted)]
            active = [b for i, b in enumerate(active) if i not in exhausted]
            retired = _ordered(retired + retiring)
            logger.debug(f"Stage {stage} round {r}: retired {len(retiring)} components")

    complete = not active
    if not complete:
        logger.warning(f"Stage {stage}: {len(active)} components still active after {used} rounds")
    return DecompositionResult(
        components=_ordered(retired + active),
        crossing_edges=S,
        complete=complete,
        rounds=used,
        merges=merges,
    )


def conditional_edge_recovery(bank: SamplerBank, stage: int, phi: Fraction, kappa: Fraction,
                              base_partition: Partition,
                              already: Optional[Mapping[Hyperedge, int]] = None) -> Dict[Hyperedge, int]:
    """All stage edges of strength <= kappa in the stage hypergraph contracted by base_partition."""
    config = bank.config
    phi, kappa = Fraction(phi), Fraction(kappa)
    if kappa >= phi * config.log_n:
        raise ParameterError(f"kappa={kappa} must be below phi * log n = {phi * config.log_n}")
    result = strength_decomposition(bank, stage, phi, base_partition, already)
    T = result.partition
    S = Hypergraph(config.n, dict(result.crossing_edges))
    originals = contraction_map(S, T)
    contracted = contract(S, T)

    if contracted.total_weight <= kappa:
        keep = list(contracted.edges)
    else:
        if contracted.n > config.oracle_vertex_cap:
            raise OracleCapExceededError(contracted.n, config.oracle_vertex_cap,
                                         "super-vertices in conditional recovery")
        strengths = strength_recursive(contracted, config.oracle_vertex_cap)
        keep = [e for e, s in strengths.items() if s <= kappa]

    out: Dict[Hyperedge, int] = {}
    for ce in keep:
        for e in originals[ce]:
            out[e] = result.crossing_edges[e]
    logger.info(f"Stage {stage}: {len(out)} edges of strength <= {kappa} over {T.k} components")
    return out

"""
Layered sparsification.

Stage i recovers every residual edge of strength <= kappa in the stage
hypergraph contracted by its preprocessing partition, emits each of its
copies with weight 2^i and subtracts it from every deeper stage. Stage
filters act on edge identity, so all copies of a parallel edge survive or
vanish together. The last stage has no deeper stage to defer to: it
recovers every edge it still holds.
"""

import logging
from fractions import Fraction
from typing import Optional, Tuple

from hypersketch.core.config import SketchConfig
from hypersketch.core.errors import ConfigMismatchError, EdgeBudgetExceededError
from hypersketch.core.prf import Prf
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition
from hypersketch.schemas.sparsifier import SparsifierOutput, StrongComponentSchedule
from hypersketch.services.incidence.bundle import SketchBundle
from hypersketch.services.incidence.connectivity_bank import ConnectivityBank
from hypersketch.services.incidence.sampler_bank import SamplerBank, SamplerLayout
from hypersketch.services.oracle.exact_oracle import strength_recursive
from hypersketch.services.sparsify.decomposition import conditional_edge_recovery
from hypersketch.services.sparsify.preprocessing import recover_strong_components

logger = logging.getLogger("hypersketch.sparsify")


def size_bound(config: SketchConfig) -> int:
    """c * n * log n / eps*^2."""
    return config.size_bound


def is_last_stage(config: SketchConfig, stage: int) -> bool:
    return stage == config.stages - 1


def stage_thresholds(config: SketchConfig, stage: int) -> Tuple[Fraction, Fraction]:
    """(phi, kappa) for a stage.

    The last stage lifts kappa to at least m_max, so no edge can be strong
    enough to stay behind and every block runs to exhaustion.
    """
    if not is_last_stage(config, stage):
        return config.recovery_phi, config.kappa
    kappa = max(config.kappa, Fraction(config.m_max))
    return 2 * kappa, kappa


def emit(output: SparsifierOutput, e: Hyperedge, mult: int, stage: int) -> None:
    """One entry of weight 2^stage per copy."""
    for _ in range(mult):
        output.add(e, 1 << stage, stage)


def _new_output(config: SketchConfig, prf: Prf) -> SparsifierOutput:
    return SparsifierOutput(
        n=config.n,
        r_max=config.r_max,
        eps=config.eps,
        eps_star=config.eps_star,
        seed_commitment=prf.commitment().hex(),
        size_bound=size_bound(config),
    )


def _schedule_for(conn_bank: ConnectivityBank, config: SketchConfig) -> Optional[StrongComponentSchedule]:
    if config.effective_offset >= conn_bank.stages:
        logger.info(
            f"Preprocessing offset {config.effective_offset} is past the last connectivity stage; "
            f"every stage starts from singletons"
        )
        return None
    return recover_strong_components(conn_bank)


def sparsify(bank: SamplerBank, conn_bank: ConnectivityBank,
             config: Optional[SketchConfig] = None) -> SparsifierOutput:
    config = config or bank.config
    if config != bank.config or conn_bank.config != bank.config:
        raise ConfigMismatchError("banks and decode config disagree")
    if conn_bank.prf.commitment() != bank.prf.commitment():
        raise ConfigMismatchError("sampler and connectivity banks use different master seeds")
    output = _new_output(config, bank.prf)
    offset = config.effective_offset
    schedule = _schedule_for(conn_bank, config)
    logger.info(f"Decoding {config.stages} stages: eps*={config.eps_star}, kappa={config.kappa}, offset={offset}")

    working = bank.clone()
    for stage in range(config.stages):
        phi, kappa = stage_thresholds(config, stage)
        if is_last_stage(config, stage):
            base = Partition.singletons(config.n)
        else:
            base = schedule.base_partition(stage, offset) if schedule else Partition.singletons(config.n)
        F = conditional_edge_recovery(working, stage, phi, kappa, base)
        for e, mult in sorted(F.items()):
            emit(output, e, mult, stage)
        if is_last_stage(config, stage):
            working.remove_recovered(F, stages=[stage])
            if not working.is_empty(stages=[stage]):
                logger.warning(f"Stage {stage}: sketch still holds edges after the final recovery")
            break
        deeper = range(stage + 1, config.stages)
        working.remove_recovered(F, stages=deeper)
        if working.is_empty(stages=deeper):
            logger.info(f"Stage {stage} recovered everything remaining; stopping")
            break
    logger.info(f"Sparsifier: {len(output)} edges (size bound {output.size_bound})")
    return output


def decode_bundle(bundle: SketchBundle) -> SparsifierOutput:
    return sparsify(bundle.sampler_bank, bundle.conn_bank)


def ideal_sparsify(H: Hypergraph, config: SketchConfig, prf: Prf) -> SparsifierOutput:
    """Reference pipeline on the hypergraph itself, with the sketch's own stage filters."""
    if H.total_weight > config.m_max:
        raise EdgeBudgetExceededError(H.total_weight, config.m_max)
    stage_filter = SamplerLayout.shared(config, prf).stage_filter
    output = _new_output(config, prf)
    residual = H.copy()
    for stage in range(config.stages):
        stage_graph = Hypergraph(H.n, {e: w for e, w in residual.edges.items()
                                       if stage_filter.admits(e.mask, stage)})
        if not len(stage_graph):
            break
        _, kappa = stage_thresholds(config, stage)
        if stage_graph.total_weight <= kappa:
            keep = list(stage_graph.edges)
        else:
            keep = list(strength_recursive(stage_graph, config.oracle_vertex_cap).below(kappa))
        for e in sorted(keep):
            emit(output, e, stage_graph.weight(e), stage)
            residual.remove_edge(e)
    return output

"""
Fingerprinted recovery of crossing edges from a SamplerBank.

A pass works on a private copy of one stage. Levels run from log n down to 0;
inside a level every repetition sweeps every fingerprint rate and opens one
component sampler per unresolved block. Each decoded edge is checked against
its fingerprint, subtracted from the stage copy and credited to the lowest-indexed
incident block that is not yet saturated. Blocks are only declared exhausted
at level 0, where fingerprints are the identity.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Union

from hypersketch.core.errors import PartitionError
from hypersketch.schemas.hypergraph import Hyperedge, Partition
from hypersketch.schemas.recovery import BlockVerdict, RecoveryDiagnostics, RecoveryOutcome
from hypersketch.services.incidence.sampler_bank import SamplerBank

logger = logging.getLogger("hypersketch.recovery")

EdgeSet = Union[Mapping[Hyperedge, int], Iterable[Hyperedge]]


class RecoveryRun:
    """State of one recovery pass: the stage copy, the blocks and what has been found."""

    def __init__(self, bank: SamplerBank, stage: int, P: Partition, already: Optional[EdgeSet],
                 phi: Fraction):
        config = bank.config
        if not 0 <= stage < config.stages:
            raise PartitionError(f"stage {stage} outside [0, {config.stages})")
        for block in P.blocks:
            if max(block) >= config.n:
                raise PartitionError(f"block {sorted(block)} names a vertex outside n={config.n}")
        self.config = config
        self.stage = stage
        self.partition = P
        self.blocks = [sorted(b) for b in P.blocks]
        self.masks = P.block_masks()
        self.threshold = config.saturation_threshold(phi)
        self.view = bank.stage_view(stage)
        if already:
            self.view.remove_recovered(already)
        self.valid_id = self.view.layout.plausible_id(stage)

        k = len(self.blocks)
        self.exhausted = [False] * k
        self.credit_count = [0] * k
        self.recovered: Dict[Hyperedge, int] = {}
        self.credits: Dict[Hyperedge, int] = {}
        self.diagnostics = RecoveryDiagnostics()

    # ─── Block state ───

    def resolved(self, i: int) -> bool:
        return self.exhausted[i] or self.credit_count[i] >= self.threshold

    def all_resolved(self) -> bool:
        return all(self.resolved(i) for i in range(len(self.blocks)))

    def _mark_exhausted(self, i: int) -> None:
        if not self.exhausted[i]:
            self.exhausted[i] = True
            logger.debug(f"Stage {self.stage}: block {i} exhausted")

    # ─── Edge intake ───

    def _accept(self, edge: Hyperedge, mult: int) -> None:
        self.recovered[edge] = self.recovered.get(edge, 0) + mult
        self.view.remove_recovered({edge: mult})
        for i, mask in enumerate(self.masks):
            if edge.mask & mask and self.credit_count[i] < self.threshold and not self.exhausted[i]:
                self.credits[edge] = i
                self.credit_count[i] += 1
                break

    def _certify(self, i: int) -> None:
        """Try to close block i with its tail sketch; recovers up to `tail_sparsity` edges at once."""
        tail = self.view.component_tail(self.stage, self.blocks[i])
        if tail is None:
            return
        vector = tail.decode()
        if vector is None:
            return
        found = []
        for edge_id, value in sorted(vector.items()):
            hit = self.view.identify(self.stage, edge_id, value, self.masks[i])
            if hit is None:
                self.diagnostics.inconsistent += 1
                logger.warning(f"Stage {self.stage}: tail sketch of block {i} decoded an inconsistent id")
                return
            found.append(hit)
        for edge, mult in found:
            self._accept(edge, mult)
        self.diagnostics.tail_certified += 1
        self._mark_exhausted(i)

    # ─── Passes ───

    def run_level(self, level: int) -> int:
        """One fingerprint level: every repetition, every rate, every open block."""
        before = len(self.recovered)
        base = level == 0
        if base:
            self._certify_open()
        for rep in range(self.view.layout.repetitions):
            if self.all_resolved():
                break
            for rate in range(self.config.rates):
                for i, block in enumerate(self.blocks):
                    if self.resolved(i):
                        continue
                    self._open(level, rate, rep, i, block, base)
            if base:
                self._certify_open()
        new = len(self.recovered) - before
        self.diagnostics.record_level(level, new)
        return new

    def _certify_open(self) -> None:
        for i in range(len(self.blocks)):
            if not self.resolved(i):
                self._certify(i)

    def _open(self, level: int, rate: int, rep: int, i: int, block: List[int], base: bool) -> None:
        sampler = self.view.component_sampler(self.stage, level, rate, rep, block)
        self.diagnostics.opened += 1
        if sampler.is_zero():
            self.diagnostics.empty += 1
            if base and rate == 0:
                # unfingerprinted slot: nothing crosses this block any more
                self._mark_exhausted(i)
            return
        sample = sampler.sample(self.valid_id)
        if sample is None:
            self.diagnostics.failed_samples += 1
            return
        edge_id, value = sample
        hit = self.view.identify(self.stage, edge_id, value, self.masks[i], (level, rate, rep))
        if hit is None:
            self.diagnostics.inconsistent += 1
            logger.warning(f"Stage {self.stage}: skipped inconsistent decode at level {level} rate {rate} rep {rep}")
            return
        self._accept(*hit)

    def outcome(self) -> RecoveryOutcome:
        verdicts = []
        for i in range(len(self.blocks)):
            if self.exhausted[i]:
                verdicts.append(BlockVerdict.EXHAUSTED)
            elif self.credit_count[i] >= self.threshold:
                verdicts.append(BlockVerdict.SATURATED)
            else:
                verdicts.append(BlockVerdict.INCOMPLETE)
        self.diagnostics.classify(self.partition, self.recovered)
        return RecoveryOutcome(
            partition=self.partition,
            verdicts=verdicts,
            recovered=dict(self.recovered),
            credits=dict(self.credits),
            threshold=self.threshold,
            diagnostics=self.diagnostics,
        )


def iterative_recovery(bank: SamplerBank, stage: int, level: int, P: Partition,
                       already: Optional[EdgeSet], phi: Fraction) -> RecoveryOutcome:
    """A single fingerprint level of recovery."""
    run = RecoveryRun(bank, stage, P, already, phi)
    run.run_level(level)
    return run.outcome()


def recover(bank: SamplerBank, stage: int, P: Partition, already: Optional[EdgeSet],
            phi: Fraction) -> RecoveryOutcome:
    """All fingerprint levels, log n down to 0, on one stage copy."""
    run = RecoveryRun(bank, stage, P, already, phi)
    for level in range(bank.config.fingerprint_levels - 1, -1, -1):
        if run.all_resolved():
            break
        run.run_level(level)
    outcome = run.outcome()
    exhausted, saturated, incomplete = outcome.summary()
    logger.info(
        f"Stage {stage}: recovered {len(outcome.recovered)} edges over {P.k} blocks "
        f"({exhausted} exhausted, {saturated} saturated, {incomplete} incomplete)"
    )
    if incomplete:
        logger.warning(f"Stage {stage}: {incomplete} blocks neither exhausted nor saturated")
    return outcome

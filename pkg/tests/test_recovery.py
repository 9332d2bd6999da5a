"""Tests for fingerprinted recovery of crossing edges."""

from fractions import Fraction

import pytest

from hypersketch.core.errors import PartitionError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition
from hypersketch.schemas.recovery import BlockVerdict, size_class
from hypersketch.services.incidence.sampler_bank import SamplerBank
from hypersketch.services.recovery.iterative import iterative_recovery, recover

TWO_TRIANGLES = Partition.from_blocks([{0, 1, 2}, {3, 4, 5}])


def _bank(config, prf, H) -> SamplerBank:
    bank = SamplerBank(config, prf)
    for e, w in H.items():
        bank.encode_update(e, w)
    return bank


class TestRecover:
    """Verdicts, credits and the recovered set."""

    def test_bridge_between_triangles(self, small_config, prf, joined_triangles):
        outcome = recover(_bank(small_config, prf, joined_triangles), 0, TWO_TRIANGLES, None, Fraction(1, 10))
        assert outcome.threshold == 1
        assert outcome.recovered == {Hyperedge.of(2, 3): 1}
        assert outcome.credits == {Hyperedge.of(2, 3): 0}
        assert outcome.verdicts[1] is BlockVerdict.EXHAUSTED
        assert outcome.incomplete == []

    def test_singletons_recover_everything(self, small_config, prf, triangle):
        H = Hypergraph(6, dict(triangle.items()))
        outcome = recover(_bank(small_config, prf, H), 0, Partition.singletons(6), None, small_config.recovery_phi)
        assert outcome.recovered == dict(H.items())
        assert outcome.summary() == (6, 0, 0)

    def test_credits_land_in_incident_blocks(self, small_config, prf, joined_triangles):
        P = Partition.singletons(6)
        outcome = recover(_bank(small_config, prf, joined_triangles), 0, P, None, Fraction(1, 3))
        masks = P.block_masks()
        for edge, block in outcome.credits.items():
            assert edge.mask & masks[block]
        for i in range(P.k):
            assert outcome.credited_count(i) <= outcome.threshold
        assert set(outcome.recovered) <= set(joined_triangles)

    def test_already_recovered_edges_are_skipped(self, small_config, prf, joined_triangles):
        bank = _bank(small_config, prf, joined_triangles)
        before = bank.to_bytes()
        outcome = recover(bank, 0, TWO_TRIANGLES, {Hyperedge.of(2, 3): 1}, Fraction(1))
        assert outcome.recovered == {}
        assert outcome.exhausted == [0, 1]
        assert bank.to_bytes() == before

    def test_single_level(self, small_config, prf, joined_triangles):
        outcome = iterative_recovery(_bank(small_config, prf, joined_triangles), 0, 0, TWO_TRIANGLES, None,
                                     Fraction(1))
        assert outcome.recovered == {Hyperedge.of(2, 3): 1}
        assert outcome.incomplete == []
        assert 0 in outcome.diagnostics.per_level

    def test_diagnostics_dump(self, small_config, prf, joined_triangles):
        outcome = recover(_bank(small_config, prf, joined_triangles), 0, TWO_TRIANGLES, None, Fraction(1))
        text = outcome.diagnostics.dump()
        assert "opened=" in text
        assert "recovery d=" in text

    def test_stage_out_of_range(self, small_config, prf):
        with pytest.raises(PartitionError):
            recover(SamplerBank(small_config, prf), small_config.stages, Partition.singletons(6), None, Fraction(1))

    def test_block_outside_n(self, small_config, prf):
        with pytest.raises(PartitionError):
            recover(SamplerBank(small_config, prf), 0, Partition.from_blocks([{0, 9}]), None, Fraction(1))


class TestSizeClass:
    def test_floor_log2(self):
        assert [size_class(c) for c in (0, 1, 2, 3, 4, 9)] == [0, 0, 1, 1, 2, 3]

"""Tests for the vertex-incidence banks and the bundle file format."""

import pytest

from hypersketch.core.errors import BankFormatError, ConfigMismatchError, VertexOutOfRangeError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph
from hypersketch.services.incidence.bundle import SketchBundle, merge_bundles
from hypersketch.services.incidence.connectivity_bank import ConnectivityBank
from hypersketch.services.incidence.encoding import coefficient_over, incidence_coefficients
from hypersketch.services.incidence.operations import component_sampler, encode_update, merge, remove_recovered
from hypersketch.services.incidence.sampler_bank import SamplerBank

LEFT = (0, 1, 2)
LEFT_MASK = 0b000111


class TestEncoding:
    """Incidence coefficients cancel over any set containing the whole edge."""

    def test_coefficients_sum_to_zero(self):
        coeffs = incidence_coefficients([4, 1, 2])
        assert coeffs == [(1, 1), (2, 1), (4, -2)]
        assert sum(c for _, c in coeffs) == 0

    def test_coefficient_over_mask(self):
        assert coefficient_over((1, 2, 4), 0b00110) == 2
        assert coefficient_over((1, 2, 4), 0b10000) == -2
        assert coefficient_over((1, 2, 4), 0b10110) == 0
        assert coefficient_over((1, 2, 4), 0b01001) == 0


class TestSamplerBank:
    """Per-vertex samplers and component sums."""

    def test_component_sum_sees_only_crossing_edge(self, small_config, prf, joined_triangles):
        bank = SamplerBank(small_config, prf)
        for e, w in joined_triangles.items():
            encode_update(bank, e, w)
        sampler = component_sampler(bank, 0, 0, 0, 0, LEFT)
        got = sampler.sample()
        assert got is not None
        edge_id, value = got
        assert bank.identify(0, edge_id, value, LEFT_MASK, (0, 0, 0)) == (Hyperedge.of(2, 3), 1)

    def test_whole_vertex_set_is_empty(self, small_config, prf, joined_triangles):
        bank = SamplerBank(small_config, prf)
        for e, w in joined_triangles.items():
            bank.encode_update(e, w)
        assert bank.component_sampler(0, 0, 0, 0, range(6)).is_zero()

    def test_remove_recovered_clears_bank(self, small_config, prf, triangle):
        bank = SamplerBank(small_config, prf)
        for e, w in triangle.items():
            bank.encode_update(e, w)
        remove_recovered(bank, dict(triangle.items()))
        assert bank.is_empty()

    def test_identify_rejects_wrong_multiplicity_sign(self, small_config, prf):
        bank = SamplerBank(small_config, prf)
        assert bank.identify(0, Hyperedge.of(0, 1).mask, -1, 0b01) is None

    def test_identify_rejects_implausible_id(self, small_config, prf):
        bank = SamplerBank(small_config, prf)
        assert bank.identify(0, 0b1, 1, 0b1) is None

    def test_tail_certifies_small_cut(self, small_config, prf, joined_triangles):
        bank = SamplerBank(small_config, prf)
        for e, w in joined_triangles.items():
            bank.encode_update(e, w)
        tail = bank.component_tail(0, LEFT)
        assert tail is not None
        assert tail.decode() == {Hyperedge.of(2, 3).mask: 1}

    def test_stage_view_is_independent(self, small_config, prf, triangle):
        bank = SamplerBank(small_config, prf)
        for e, w in triangle.items():
            bank.encode_update(e, w)
        before = bank.to_bytes()
        view = bank.stage_view(0)
        view.remove_recovered(list(triangle))
        assert view.is_empty()
        assert bank.to_bytes() == before

    def test_vertex_outside_n(self, small_config, prf):
        with pytest.raises(VertexOutOfRangeError):
            SamplerBank(small_config, prf).encode_update((0, 6), 1)


class TestConnectivityBank:
    """Connectivity samplers over the same incidence encoding."""

    def test_component_sampler(self, small_config, prf, joined_triangles):
        bank = ConnectivityBank(small_config, prf)
        for e, w in joined_triangles.items():
            bank.encode_update(e, w)
        got = bank.component_sampler(0, 0, LEFT).sample()
        assert got is not None
        assert got[0] == Hyperedge.of(2, 3).mask

    def test_merge_helper_leaves_inputs(self, small_config, prf):
        a, b = ConnectivityBank(small_config, prf), ConnectivityBank(small_config, prf)
        a.encode_update((0, 1), 1)
        b.encode_update((1, 2), 1)
        a_bytes = a.to_bytes()
        joint = ConnectivityBank(small_config, prf)
        joint.encode_update((0, 1), 1)
        joint.encode_update((1, 2), 1)
        assert merge(a, b) == joint
        assert a.to_bytes() == a_bytes


class TestSketchBundle:
    """Linearity, fragments and bank files."""

    def test_order_and_split_independent(self, small_config, prf, joined_triangles):
        reference = SketchBundle.of_hypergraph(joined_triangles, small_config, prf)
        edges = list(joined_triangles)
        left = SketchBundle.empty(small_config, prf)
        right = SketchBundle.empty(small_config, prf)
        for i, e in enumerate(reversed(edges)):
            (left if i % 2 else right).encode_update(e, 1)
        assert (left + right).to_bytes() == reference.to_bytes()

    def test_insert_then_delete_is_empty(self, small_config, prf):
        bundle = SketchBundle.empty(small_config, prf)
        bundle.encode_update((0, 2, 4), 2)
        bundle.encode_update((0, 2, 4), -2)
        assert bundle.is_empty()
        assert bundle.to_bytes() == SketchBundle.empty(small_config, prf).to_bytes()

    def test_vertex_fragments_sum_to_bundle(self, small_config, prf, joined_triangles):
        bundle = SketchBundle.of_hypergraph(joined_triangles, small_config, prf)
        fragments = [bundle.vertex_fragment(v) for v in bundle.vertices()]
        assert list(bundle.vertices()) == list(range(6))
        assert merge_bundles(fragments) == bundle

    def test_bytes_round_trip(self, small_config, prf, triangle):
        bundle = SketchBundle.of_hypergraph(triangle, small_config, prf)
        assert SketchBundle.from_bytes(bundle.to_bytes(), prf, expect=small_config) == bundle

    def test_wrong_seed(self, small_config, prf, other_prf, triangle):
        data = SketchBundle.of_hypergraph(triangle, small_config, prf).to_bytes()
        with pytest.raises(ConfigMismatchError):
            SketchBundle.from_bytes(data, other_prf)

    def test_wrong_config(self, small_config, prf):
        data = SketchBundle.empty(small_config, prf).to_bytes()
        other = small_config.model_copy(update={"m_max": 32})
        with pytest.raises(ConfigMismatchError):
            SketchBundle.from_bytes(data, prf, expect=other)

    def test_merging_different_seeds(self, small_config, prf, other_prf):
        with pytest.raises(ConfigMismatchError):
            SketchBundle.empty(small_config, prf) + SketchBundle.empty(small_config, other_prf)

    def test_bad_magic(self, prf):
        with pytest.raises(BankFormatError):
            SketchBundle.from_bytes(b"NOPE" + bytes(8), prf)

    def test_truncated(self, small_config, prf, triangle):
        data = SketchBundle.of_hypergraph(triangle, small_config, prf).to_bytes()
        with pytest.raises(BankFormatError):
            SketchBundle.from_bytes(data[:-3], prf)

    def test_trailing_bytes(self, small_config, prf):
        data = SketchBundle.empty(small_config, prf).to_bytes()
        with pytest.raises(BankFormatError):
            SketchBundle.from_bytes(data + b"\x00", prf)

    def test_parallel_copies(self, small_config, prf):
        H = Hypergraph.from_edges(6, [(1, 4), (1, 4), (1, 4)])
        bundle = SketchBundle.of_hypergraph(H, small_config, prf)
        assert bundle.sampler_bank.component_tail(0, [1]).decode() == {Hyperedge.of(1, 4).mask: 3}

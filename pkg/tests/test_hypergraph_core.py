"""Tests for hyperedges, partitions, cuts, contraction and the text formats."""

from fractions import Fraction

import numpy as np
import pytest

from hypersketch.core.errors import (
    ArityError, HypergraphFormatError, NegativeMultiplicityError, PartitionError, VertexOutOfRangeError,
)
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition
from hypersketch.schemas.sparsifier import SparsifierOutput
from hypersketch.services.hypergraph.cuts import (
    canonical_id, contract, contraction_map, crossing_edges, cut_value,
)
from hypersketch.services.hypergraph.generators import dynamic_stream, random_hypergraph, random_shards
from hypersketch.services.hypergraph.text_format import (
    format_hypergraph, format_sparsifier, parse_hypergraph, parse_sparsifier, parse_stream,
)

TWO_TRIANGLES = Partition.from_blocks([{0, 1, 2}, {3, 4, 5}])


class TestHyperedge:
    """Canonical form and validation."""

    def test_vertices_sorted_and_masked(self):
        e = Hyperedge.of(2, 0, 1)
        assert e.vertices == (0, 1, 2)
        assert e.mask == 0b111
        assert e.arity == 3

    def test_id_round_trip(self):
        assert Hyperedge.from_id(0b1010) == Hyperedge.of(1, 3)
        assert canonical_id(Hyperedge.of(1, 3), 4) == 0b1010

    def test_single_vertex_rejected(self):
        with pytest.raises(ArityError):
            Hyperedge.of(3)

    def test_vertex_out_of_range(self):
        with pytest.raises(VertexOutOfRangeError):
            Hyperedge.of(0, 3).validate(3)

    def test_arity_above_r_max(self):
        with pytest.raises(ArityError):
            Hyperedge.of(0, 1, 2).validate(4, r_max=2)

    def test_membership(self):
        e = Hyperedge.of(1, 4)
        assert 4 in e
        assert 2 not in e


class TestHypergraph:
    """Multiset behavior."""

    def test_parallel_copies_add_weight(self):
        H = Hypergraph(3)
        H.add_edge((0, 1))
        H.add_edge((1, 0), 2)
        assert H.weight((0, 1)) == 3
        assert H.distinct_edges == 1
        assert H.total_weight == 3

    def test_negative_multiplicity_rejected(self):
        H = Hypergraph(3)
        H.add_edge((0, 1))
        with pytest.raises(NegativeMultiplicityError):
            H.add_edge((0, 1), -2)

    def test_removing_all_copies_drops_edge(self, triangle):
        triangle.remove_edge((0, 1))
        assert (0, 1) not in triangle
        assert len(triangle) == 2

    def test_induced_keeps_inside_edges_only(self, joined_triangles):
        sub = joined_triangles.induced({0, 1, 2, 3})
        assert set(sub) == {Hyperedge.of(0, 1), Hyperedge.of(1, 2), Hyperedge.of(0, 2), Hyperedge.of(2, 3)}


class TestPartition:
    """Partition validation."""

    def test_overlapping_blocks_rejected(self):
        with pytest.raises(PartitionError):
            Partition.from_blocks([{0, 1}, {1, 2}])

    def test_from_labels(self):
        P = Partition.from_labels([0, 1, 0, 1])
        assert P.canonical_key() == ((0, 2), (1, 3))

    def test_contracted_block_of(self):
        P = Partition.from_blocks([{0, 1}, {2}, {3}])
        assert P.contracted_block_of((1, 2, 3)) == Hyperedge.of(0, 1, 2)
        assert P.contracted_block_of((0, 1)) is None

    def test_cover_required_for_cut(self, triangle):
        with pytest.raises(PartitionError):
            cut_value(triangle, Partition.from_blocks([{0}, {1}]))


class TestCuts:
    """Crossing weight, normalization and contraction."""

    def test_bridge_cut(self, joined_triangles):
        assert cut_value(joined_triangles, TWO_TRIANGLES) == (1, Fraction(1))

    def test_three_block_cut_is_normalized(self, joined_triangles):
        P = Partition.from_blocks([{0, 1, 2}, {3}, {4, 5}])
        assert cut_value(joined_triangles, P) == (3, Fraction(3, 2))

    def test_crossing_edges_with_partial_cover(self, joined_triangles):
        crossing = crossing_edges(joined_triangles, Partition.from_blocks([{0, 1, 2}]))
        assert set(crossing) == {Hyperedge.of(2, 3), Hyperedge.of(3, 4), Hyperedge.of(4, 5), Hyperedge.of(3, 5)}

    def test_contraction_drops_self_loops(self, joined_triangles):
        C = contract(joined_triangles, TWO_TRIANGLES)
        assert C.n == 2
        assert dict(C.edges) == {Hyperedge.of(0, 1): 1}

    def test_contraction_merges_parallel_images(self):
        H = Hypergraph.from_edges(4, [(0, 2), (1, 3), (0, 1, 2)])
        P = Partition.from_blocks([{0, 1}, {2, 3}])
        assert contract(H, P).weight((0, 1)) == 3
        assert len(contraction_map(H, P)[Hyperedge.of(0, 1)]) == 3


class TestTextFormat:
    """Hypergraph, stream and sparsifier files."""

    def test_parse_hypergraph_fixture(self, fixtures_dir):
        H = parse_hypergraph((fixtures_dir / "joined_triangles.txt").read_text())
        assert H.n == 6
        assert H.distinct_edges == 8
        assert H.weight((2, 3)) == 2
        assert H.weight((0, 4, 5)) == 1

    def test_stream_final_multiset_matches_hypergraph(self, fixtures_dir):
        n, r_max, updates = parse_stream((fixtures_dir / "joined_triangles_stream.txt").read_text())
        assert (n, r_max) == (6, 3)
        H = Hypergraph(n, r_max=r_max)
        for u in updates:
            H.add_edge(u.edge, u.delta)
        assert H == parse_hypergraph((fixtures_dir / "joined_triangles.txt").read_text())

    def test_bad_vertex_reports_line_and_column(self, fixtures_dir):
        with pytest.raises(HypergraphFormatError) as info:
            parse_hypergraph((fixtures_dir / "bad_vertex.txt").read_text(), source="bad_vertex.txt")
        assert (info.value.line, info.value.column) == (3, 5)
        assert str(info.value).startswith("bad_vertex.txt:3:5:")

    def test_bad_header(self):
        with pytest.raises(HypergraphFormatError) as info:
            parse_hypergraph("n 4\n+ 0,1\n")
        assert info.value.line == 1

    def test_delete_not_allowed_in_hypergraph(self):
        with pytest.raises(HypergraphFormatError):
            parse_hypergraph("n 3 r 2\n- 0,1\n")

    def test_repeated_vertex_rejected(self):
        with pytest.raises(HypergraphFormatError):
            parse_hypergraph("n 3 r 3\n+ 0,1,1\n")

    def test_comments_and_blank_lines(self):
        H = parse_hypergraph("# header next\nn 3 r 2\n\n+ 0,1  # first\n+ 1,2 3\n")
        assert H.total_weight == 4

    def test_format_then_parse(self, joined_triangles):
        assert parse_hypergraph(format_hypergraph(joined_triangles, r_max=2)) == joined_triangles

    def test_sparsifier_file(self):
        out = SparsifierOutput(n=4, r_max=3, eps=Fraction(1, 2), eps_star=Fraction(1, 32),
                               seed_commitment="ab" * 32, size_bound=100)
        out.add(Hyperedge.of(0, 1, 2), 4, 2)
        out.add(Hyperedge.of(2, 3), 1, 0)
        text = format_sparsifier(out)
        assert text.splitlines()[1] == "e 2,3 1 0"
        parsed = parse_sparsifier(text)
        assert parsed.eps_star == Fraction(1, 32)
        assert parsed.size_bound == 100
        assert parsed.as_hypergraph() == out.as_hypergraph()

    def test_sparsifier_copy_column(self):
        out = SparsifierOutput(n=4, r_max=2, eps=Fraction(1, 2), eps_star=Fraction(1, 32))
        out.add(Hyperedge.of(0, 1), 2, 1)
        out.add(Hyperedge.of(0, 1), 2, 1)
        text = format_sparsifier(out)
        assert text.splitlines()[1:] == ["e 0,1 2 1", "e 0,1 2 1 1"]
        parsed = parse_sparsifier(text)
        assert parsed.sorted_entries() == out.sorted_entries()
        assert parsed.as_hypergraph().weight((0, 1)) == 4

    def test_sparsifier_negative_copy_rejected(self):
        with pytest.raises(HypergraphFormatError):
            parse_sparsifier("n 4 r 2 eps 1/2 eps_star 1/32 seed -\ne 0,1 1 0 -1\n")

    def test_sparsifier_duplicate_copy_rejected(self):
        text = "n 4 r 2 eps 1/2 eps_star 1/32 seed -\ne 0,1 1 0 1\ne 0,1 1 0\ne 0,1 1 0 1\n"
        with pytest.raises(HypergraphFormatError) as info:
            parse_sparsifier(text)
        assert info.value.line == 4

    def test_sparsifier_duplicate_edge_rejected(self):
        text = "n 4 r 2 eps 1/2 eps_star 1/32 seed -\ne 0,1 2 1\ne 0,1 1 0\n"
        with pytest.raises(HypergraphFormatError) as info:
            parse_sparsifier(text)
        assert info.value.line == 3


class TestGenerators:
    """Seeded instance generators."""

    def test_random_hypergraph_respects_shape(self):
        H = random_hypergraph(np.random.default_rng(1), 7, 20, 4)
        assert H.total_weight == 20
        assert all(2 <= e.arity <= 4 and e.max_vertex < 7 for e in H)

    def test_dynamic_stream_never_goes_negative(self, joined_triangles):
        stream = dynamic_stream(np.random.default_rng(5), joined_triangles, 0.3, r_max=3)
        running = Hypergraph(6)
        for u in stream:
            running.add_edge(u.edge, u.delta)
        assert running == joined_triangles
        deletes = sum(1 for u in stream if u.delta < 0)
        assert deletes >= 0.3 * len(stream) - 1

    def test_random_shards_partition_items(self):
        items = list(range(50))
        shards = random_shards(np.random.default_rng(2), items, 4)
        assert len(shards) == 4
        assert sorted(x for s in shards for x in s) == items

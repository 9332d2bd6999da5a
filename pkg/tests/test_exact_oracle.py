"""Tests for the brute-force oracle: Phi, strengths, cut counts and verification."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from hypersketch.core.errors import OracleCapExceededError, ParameterError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph, Partition
from hypersketch.services.hypergraph.cuts import contract
from hypersketch.services.oracle.exact_oracle import (
    component_strength, connected_components, count_small_kcuts, edges_below_strength,
    enumerate_partitions, min_normalized_kcut, min_two_cut, strength_characterization,
    strength_recursive, verify_sparsifier,
)
from hypersketch.services.oracle.union_find import UnionFind


@st.composite
def small_hypergraphs(draw, max_n: int = 5, max_m: int = 8):
    n = draw(st.integers(min_value=3, max_value=max_n))
    edges = draw(st.lists(
        st.sets(st.integers(min_value=0, max_value=n - 1), min_size=2, max_size=min(4, n)),
        min_size=1, max_size=max_m,
    ))
    return Hypergraph(n, [tuple(sorted(e)) for e in edges])


class TestMinNormalizedKCut:
    """Phi(H) with its witness partition."""

    def test_triangle(self, triangle):
        phi, P = min_normalized_kcut(triangle)
        assert phi == Fraction(3, 2)
        assert P.canonical_key() == ((0,), (1,), (2,))

    def test_single_hyperedge(self):
        phi, P = min_normalized_kcut(Hypergraph.from_edges(3, [(0, 1, 2)]))
        assert phi == Fraction(1, 2)
        assert P.k == 3

    def test_k4(self, k4):
        phi, P = min_normalized_kcut(k4)
        assert phi == 2
        assert P.k == 4

    def test_tie_prefers_fewer_blocks(self, path4):
        phi, P = min_normalized_kcut(path4)
        assert phi == 1
        assert P.canonical_key() == ((0,), (1, 2, 3))

    def test_disconnected_is_zero(self):
        phi, _ = min_normalized_kcut(Hypergraph.from_edges(4, [(0, 1), (2, 3)]))
        assert phi == 0

    def test_vertex_cap(self):
        with pytest.raises(OracleCapExceededError):
            min_normalized_kcut(Hypergraph.from_edges(5, [(0, 1)]), cap=4)

    def test_partition_count_is_bell_number(self):
        assert sum(1 for _ in enumerate_partitions(range(5))) == 52


class TestStrengths:
    """Recursive peeling and the max-over-subsets characterization."""

    def test_triangle(self, triangle):
        strengths = strength_recursive(triangle)
        assert all(s == Fraction(3, 2) for _, s in strengths.items())

    def test_joined_triangles(self, joined_triangles):
        strengths = strength_recursive(joined_triangles)
        assert strengths[(2, 3)] == 1
        assert strengths[(0, 1)] == Fraction(3, 2)
        assert strengths[(4, 5)] == Fraction(3, 2)
        assert strengths.distinct_values() == [Fraction(1), Fraction(3, 2)]

    def test_characterization_matches_examples(self, joined_triangles):
        assert strength_characterization(joined_triangles, (2, 3)) == 1
        assert strength_characterization(joined_triangles, (3, 5)) == Fraction(3, 2)

    def test_characterization_needs_member_edge(self, triangle):
        with pytest.raises(ParameterError):
            strength_characterization(triangle, Hyperedge.of(0, 1, 2))

    def test_component_strength(self, joined_triangles):
        assert component_strength(joined_triangles, {0, 1, 2}) == Fraction(3, 2)
        assert component_strength(joined_triangles, range(6)) == 1

    def test_below(self, joined_triangles):
        assert edges_below_strength(joined_triangles, 1) == frozenset({Hyperedge.of(2, 3)})

    def test_contraction_preserves_weak_edges(self, joined_triangles):
        """Contracting components stronger than kappa keeps the kappa-weak edges weak."""
        contracted = contract(joined_triangles, Partition.from_blocks([{0, 1, 2}, {3, 4, 5}]))
        assert strength_recursive(contracted).below(1) == frozenset({Hyperedge.of(0, 1)})
        assert edges_below_strength(joined_triangles, 1) == frozenset({Hyperedge.of(2, 3)})

    def test_seeded_corpus(self, random_instances):
        for H in random_instances(15):
            strengths = strength_recursive(H)
            for e in H:
                assert strengths[e] == strength_characterization(H, e)

    @settings(max_examples=30, deadline=None)
    @given(small_hypergraphs())
    def test_definitions_agree(self, H):
        strengths = strength_recursive(H)
        for e in H:
            assert strengths[e] == strength_characterization(H, e)

    @settings(max_examples=30, deadline=None)
    @given(small_hypergraphs())
    def test_weak_edge_count_bound(self, H):
        strengths = strength_recursive(H)
        for w in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)):
            assert sum(H.weight(e) for e in strengths.below(w)) <= (H.n - 1) * w

    @settings(max_examples=30, deadline=None)
    @given(small_hypergraphs())
    def test_at_most_n_distinct_strengths(self, H):
        assert len(strength_recursive(H).distinct_values()) <= H.n


class TestCutCounting:
    """Small k-cut census."""

    def test_triangle(self, triangle):
        assert count_small_kcuts(triangle, 1) == 0
        assert count_small_kcuts(triangle, 2) == 4

    def test_bridge_is_the_only_minimum(self, joined_triangles):
        assert count_small_kcuts(joined_triangles, 1) == 1

    def test_min_two_cut_is_the_bridge(self, joined_triangles):
        assert min_two_cut(joined_triangles) == (1, frozenset({0, 1, 2}))

    def test_min_two_cut_cap(self, joined_triangles):
        with pytest.raises(OracleCapExceededError):
            min_two_cut(joined_triangles, two_cut_cap=4)

    @settings(max_examples=20, deadline=None)
    @given(small_hypergraphs())
    def test_count_bound(self, H):
        assume(min_normalized_kcut(H)[0] > 0)
        for t in (1, 2):
            assert count_small_kcuts(H, t) <= H.n ** (2 * t)


class TestComponents:
    """Union-find connectivity."""

    def test_connected_components(self):
        H = Hypergraph.from_edges(5, [(0, 1), (2, 3, 4)])
        assert connected_components(H).canonical_key() == ((0, 1), (2, 3, 4))

    def test_components_over_partition(self):
        H = Hypergraph.from_edges(4, [(1, 2)])
        P = connected_components(H, Partition.from_blocks([{0, 1}, {2}, {3}]))
        assert P.canonical_key() == ((0, 1, 2), (3,))

    def test_union_find(self):
        uf = UnionFind(range(4))
        assert uf.union(0, 1)
        assert not uf.union(1, 0)
        assert uf.find_parent(1) == uf.find_parent(0)
        assert sorted(sorted(c) for c in uf.retrieve_components()) == [[0, 1], [2], [3]]


class TestVerify:
    """Sparsifier verification."""

    def test_identity_passes(self, joined_triangles):
        result = verify_sparsifier(joined_triangles, joined_triangles, Fraction(0), kcuts=True)
        assert result.ok
        assert result.worst_ratio == 1

    def test_doubling_fails_at_half(self, joined_triangles):
        result = verify_sparsifier(joined_triangles, joined_triangles.scaled(2), Fraction(1, 2))
        assert not result.ok
        assert result.worst_ratio == 2

    def test_dropping_the_bridge_fails(self, joined_triangles):
        Hs = joined_triangles.copy()
        Hs.remove_edge((2, 3))
        assert not verify_sparsifier(joined_triangles, Hs, Fraction(1, 2)).ok

    def test_vertex_count_mismatch(self, triangle, k4):
        with pytest.raises(ParameterError):
            verify_sparsifier(triangle, k4, Fraction(1, 2))

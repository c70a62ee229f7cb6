from __future__ import annotations

from itertools import combinations
from math import comb

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoramsey.constructions import complete_bipartite, cycle, paley
from pseudoramsey.errors import ResourceLimitError
from pseudoramsey.graph_core import (
    Graph,
    VertexSet,
    clique_number,
    complement,
    count_independent_tuples,
    degree_profile,
    enumerate_independent_sets,
    find_clique,
    independence_polynomial,
    induced_subgraph,
    is_clique_free,
    stirling2,
)

from .conftest import brute_has_clique, brute_independent_counts, brute_tuple_count, graphs


def path3() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2)])


class TestGraph:
    def test_rejects_asymmetric_rows(self):
        with pytest.raises(ValueError, match="symmetric"):
            Graph(2, (0b10, 0b00))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(1, 1)])

    def test_edges_sorted(self):
        g = Graph.from_edges(4, [(3, 1), (0, 2), (1, 0)])
        assert g.edges() == [(0, 1), (0, 2), (1, 3)]

    def test_label_not_part_of_equality(self):
        assert cycle(5).relabel("x") == cycle(5)

    def test_from_adjacency_roundtrip(self):
        g = paley(13)
        assert Graph.from_adjacency(g.adjacency_matrix()) == g

    def test_vertex_set(self):
        s = VertexSet.of([0, 3, 5])
        assert s.size == 3 and list(s) == [0, 3, 5] and 3 in s and 4 not in s
        assert s.within(6) and not s.within(5)


@pytest.mark.parametrize(
    "g, expected",
    [(cycle(5), (True, 2)), (Graph.complete(4), (True, 3)), (path3(), (False, None))],
)
def test_degree_profile(g, expected):
    assert degree_profile(g) == expected


class TestCliqueSearch:
    def test_c5_triangle_free(self, c5):
        assert is_clique_free(c5, 3) == (True, None)

    def test_k4_witness(self):
        free, witness = is_clique_free(Graph.complete(4), 4)
        assert not free and witness.to_list() == [0, 1, 2, 3]

    def test_paley13_clique_number_three(self):
        g = paley(13)
        assert is_clique_free(g, 4) == (True, None)
        assert not is_clique_free(g, 3)[0]
        assert brute_has_clique(g, 3) and not brute_has_clique(g, 4)

    def test_witness_is_a_clique_of_exact_size(self):
        g = paley(17)
        free, w = is_clique_free(g, 3)
        assert not free and w.size == 3
        assert all(g.has_edge(u, v) for u, v in combinations(w, 2))

    @settings(max_examples=150, deadline=None)
    @given(graphs(max_n=12), st.integers(2, 6))
    def test_agrees_with_exhaustive_search(self, g, s):
        free, witness = is_clique_free(g, s)
        assert free == (not brute_has_clique(g, s))
        if not free:
            assert witness.size == s
            assert all(g.has_edge(u, v) for u, v in combinations(witness, 2))

    def test_deterministic(self):
        g = paley(29)
        assert find_clique(g, 4) == find_clique(g, 4)

    @pytest.mark.parametrize("q", [5, 13, 17, 29, 37, 41])
    def test_clique_number_against_networkx(self, q):
        g = paley(q)
        nxg = nx.Graph(g.edges())
        assert clique_number(g) == max(len(c) for c in nx.find_cliques(nxg))

    def test_node_budget(self):
        with pytest.raises(ResourceLimitError):
            find_clique(paley(101), 6, node_budget=10)


class TestIndependentSets:
    def test_c5_profile(self, c5):
        assert enumerate_independent_sets(c5, 2) == [1, 5, 5]

    def test_complete_graph(self):
        assert enumerate_independent_sets(Graph.complete(6), 6) == [1, 6, 0, 0, 0, 0, 0]

    def test_empty_graph(self):
        assert enumerate_independent_sets(Graph.empty(4), 4) == [comb(4, j) for j in range(5)]

    def test_zero_pad_and_truncate(self, c5):
        assert enumerate_independent_sets(c5, 0) == [1]
        assert enumerate_independent_sets(c5, 4) == [1, 5, 5, 0, 0]

    def test_large_bipartite_closed_form(self):
        g = complete_bipartite(32, 32)
        prof = independence_polynomial(g)
        assert prof[0] == 1
        assert prof[1:] == [2 * comb(32, j) for j in range(1, 33)]

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            independence_polynomial(paley(41), node_budget=5)

    @settings(max_examples=100, deadline=None)
    @given(graphs(max_n=10))
    def test_matches_brute_force(self, g):
        assert independence_polynomial(g) == brute_independent_counts(g)

    @settings(max_examples=60, deadline=None)
    @given(graphs(max_n=10))
    def test_complement_duality(self, g):
        # independent sets of the complement are exactly the cliques of g
        cliques = sum(
            1
            for r in range(g.n + 1)
            for c in combinations(range(g.n), r)
            if all(g.has_edge(u, v) for u, v in combinations(c, 2))
        )
        assert sum(independence_polynomial(complement(g))) == cliques


class TestStirling:
    def test_small_table(self):
        assert [stirling2(4, j) for j in range(5)] == [0, 1, 7, 6, 1]
        assert stirling2(0, 0) == 1 and stirling2(3, 5) == 0

    def test_surjection_identity(self):
        # sum_j C(m, j) j! S(t, j) = m^t
        from math import factorial

        for m in range(1, 7):
            for t in range(1, 9):
                assert sum(comb(m, j) * factorial(j) * stirling2(t, j) for j in range(t + 1)) == m**t

    def test_deep_row(self):
        assert stirling2(700, 1) == 1 and stirling2(700, 700) == 1
        assert stirling2(700, 699) == comb(700, 2)


class TestTupleCount:
    def test_c5_pairs(self, c5):
        rep = count_independent_tuples(c5, 2)
        assert rep.exact_count == 15 == brute_tuple_count(c5, 2)
        assert rep.independence_profile == (1, 5, 5) and rep.alpha == 2

    def test_triangle(self):
        assert count_independent_tuples(Graph.complete(3), 3).exact_count == 3

    @pytest.mark.parametrize("n, t", [(1, 4), (4, 3), (7, 5)])
    def test_empty_graph(self, n, t):
        assert count_independent_tuples(Graph.empty(n), t).exact_count == n**t

    def test_k32_32(self):
        rep = count_independent_tuples(complete_bipartite(32, 32), 70)
        assert rep.exact_count == 2 * 32**70
        assert rep.alpha == 32

    def test_rejects_nonpositive_t(self, c5):
        with pytest.raises(ValueError):
            count_independent_tuples(c5, 0)

    @settings(max_examples=120, deadline=None)
    @given(graphs(max_n=6), st.integers(1, 5))
    def test_matches_enumeration(self, g, t):
        assert count_independent_tuples(g, t).exact_count == brute_tuple_count(g, t)

    @given(graphs(max_n=9))
    def test_single_coordinate(self, g):
        assert count_independent_tuples(g, 1).exact_count == g.n

    @settings(max_examples=60, deadline=None)
    @given(graphs(min_n=2, max_n=8), st.integers(1, 6), st.data())
    def test_monotone_under_edge_addition(self, g, t, data):
        non_edges = [(u, v) for u, v in combinations(range(g.n), 2) if not g.has_edge(u, v)]
        if not non_edges:
            return
        extra = data.draw(st.sampled_from(non_edges))
        bigger = Graph.from_edges(g.n, g.edges() + [extra])
        assert count_independent_tuples(bigger, t).exact_count <= count_independent_tuples(g, t).exact_count


class TestComplementAndInduced:
    def test_c5_self_complementary(self, c5):
        comp = complement(c5)
        assert nx.is_isomorphic(nx.Graph(comp.edges()), nx.Graph(c5.edges()))

    def test_complement_of_complete(self):
        assert complement(Graph.complete(5)) == Graph.empty(5)

    def test_induced(self):
        assert induced_subgraph(Graph.complete(5), VertexSet.of([0, 1, 2])) == Graph.complete(3)

    def test_induced_relabels(self, c5):
        sub = induced_subgraph(c5, VertexSet.of([1, 2, 4]))
        assert sub.edges() == [(0, 1)]

    def test_induced_out_of_range(self, c5):
        with pytest.raises(ValueError):
            induced_subgraph(c5, VertexSet.of([7]))

from fractions import Fraction
from itertools import combinations
from math import comb

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from errors import DomainError, FormatError
from graph_core import (
    DensityPoint,
    Graph,
    common_neighbors,
    densities,
    edge_fraction,
    flip_edge,
    partition_recovery,
    turan_class_sizes,
    turan_counts,
    turan_densities,
    turan_graph,
)


graphs = st.integers(3, 9).flatmap(
    lambda n: st.integers(0, (1 << comb(n, 2)) - 1).map(lambda code: Graph.from_edge_code(n, code))
)


def test_empty_and_complete_densities():
    assert densities(Graph.empty(5)) == DensityPoint(Fraction(0), Fraction(0))
    assert densities(Graph.complete(4)) == DensityPoint(Fraction(3, 4), Fraction(3, 8))


def test_triangle_count_matches_networkx():
    g = turan_graph(7, 3)
    assert g.triangle_count() == sum(nx.triangles(g.to_networkx()).values()) // 3


@given(graphs)
@settings(max_examples=60, deadline=None)
def test_counts_agree_with_brute_force(g):
    brute = sum(
        1 for i, j, k in combinations(range(g.n), 3)
        if g.has_edge(i, j) and g.has_edge(j, k) and g.has_edge(i, k)
    )
    assert g.triangle_count() == brute
    assert g.edge_count() == len(g.edges())


@given(graphs, st.data())
@settings(max_examples=60, deadline=None)
def test_flip_edge_deltas(g, data):
    i, j = data.draw(st.sampled_from(list(combinations(range(g.n), 2))))
    before = (g.edge_count(), g.triangle_count())
    d_edges, d_triangles = flip_edge(g, i, j)
    assert (g.edge_count(), g.triangle_count()) == (before[0] + d_edges, before[1] + d_triangles)
    assert abs(d_triangles) == common_neighbors(g, i, j)


def test_flip_edge_rejects_loop():
    with pytest.raises(DomainError):
        flip_edge(Graph.empty(4), 2, 2)


def test_turan_t_6_3_is_v2():
    assert turan_densities(6, 3) == DensityPoint(Fraction(2, 3), Fraction(2, 9))
    assert turan_counts(6, 3) == (12, 8)


def test_turan_graph_matches_counts():
    for n in range(2, 10):
        for r in range(1, n + 1):
            g = turan_graph(n, r)
            assert (g.edge_count(), g.triangle_count()) == turan_counts(n, r)


def test_turan_class_sizes():
    assert turan_class_sizes(7, 3) == [3, 2, 2]
    assert turan_class_sizes(5, 5) == [1] * 5
    with pytest.raises(DomainError):
        turan_class_sizes(4, 5)
    with pytest.raises(DomainError):
        turan_graph(4, 0)


def test_turan_densities_match_built_graphs():
    for n in range(2, 61):
        for r in range(1, n + 1):
            assert densities(turan_graph(n, r)) == turan_densities(n, r)


def test_extreme_turan_graphs():
    assert turan_graph(6, 1).edge_count() == 0
    assert turan_densities(6, 6) == densities(Graph.complete(6))


def test_edge_fraction_is_not_homomorphism_density():
    g = Graph.complete(5)
    assert edge_fraction(g) == 1.0
    assert densities(g).e == Fraction(4, 5)


def test_graph_rejects_bad_pairs():
    with pytest.raises(DomainError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(DomainError):
        Graph(1)


def test_edge_code_round_trip():
    g = turan_graph(6, 3)
    assert Graph.from_edge_code(6, g.edge_code()).rows == g.rows


def test_edge_list_and_hex_serialization():
    g = turan_graph(9, 4)
    assert Graph.from_edge_list(g.to_edge_list()).rows == g.rows
    assert Graph.from_hex(g.to_hex()).rows == g.rows
    assert g.to_edge_list().startswith("n 9\n")


def test_hex_rejects_asymmetric_rows():
    with pytest.raises(FormatError):
        Graph.from_hex("n 3\n2\n0\n0\n")
    with pytest.raises(FormatError):
        Graph.from_edge_list("0 1\n")
    with pytest.raises(FormatError):
        Graph.from_edge_list("n 3\n0 1 2\n")


@pytest.mark.parametrize("n, r", [(12, 4), (10, 3), (7, 2)])
def test_partition_recovery_on_turan_graphs(n, r):
    report = partition_recovery(turan_graph(n, r))
    assert report.num_classes == r
    assert report.violations == 0
    assert sorted(len(c) for c in report.classes) == sorted(turan_class_sizes(n, r))


def test_partition_recovery_on_complete_and_empty():
    assert partition_recovery(Graph.complete(6)).num_classes == 6
    empty = partition_recovery(Graph.empty(6))
    assert empty.num_classes == 1
    assert empty.misfit == 0


def test_partition_recovery_tolerates_noise():
    g = turan_graph(12, 3)
    flip_edge(g, 0, 1)  # 0 and 1 lie in different classes
    report = partition_recovery(g)
    assert report.num_classes == 3
    assert report.violations == 1
    assert report.misfit == Fraction(1, comb(12, 2))

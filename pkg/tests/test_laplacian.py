import pytest

from surface_laplacian.cli import random_graph
from surface_laplacian.errors import GraphError, SizeGuardError
from surface_laplacian.graph import Edge, SignedGraph, delete_edge, disjoint_union
from surface_laplacian.laplacian import (
    crsf_enumerate,
    delta,
    determinant,
    forman_sum,
    laplacian_matrix,
    skein_eval,
)
from surface_laplacian.ring import LaurentPoly, Monomial, VariableSet, augment, bar, parse_poly
from tests.conftest import THETA_DELTA


def test_theta_matrix(theta):
    matrix = laplacian_matrix(theta)
    assert matrix.size == 2
    assert matrix.rows() == [["3", "- 1 - x^1 - y^1"], ["- 1 - x^-1 - y^-1", "3"]]
    assert matrix.is_hermitian()
    assert matrix.entry(1, 1) == LaurentPoly.constant(theta.variables, 3)
    assert matrix.entry(1, 0) == bar(matrix.entry(0, 1))


def test_single_loop_matrix(torus):
    graph = SignedGraph(torus, ("v",), (Edge("e", "v", "v", 1, Monomial((1, 0))),))
    assert laplacian_matrix(graph).rows() == [["2 - x^1 - x^-1"]]


def test_edgeless_matrix(load_graph):
    matrix = laplacian_matrix(load_graph("edgeless"))
    assert matrix.rows() == [["0", "0"], ["0", "0"]]
    assert determinant(matrix) == 0


def test_empty_graph_has_unit_delta(torus):
    graph = SignedGraph(torus, ())
    for method in ("det", "skein", "forman"):
        assert delta(graph, method) == 1


def test_theta_three_ways(theta):
    assert str(determinant(laplacian_matrix(theta))) == THETA_DELTA
    assert str(skein_eval(theta)) == THETA_DELTA
    assert str(forman_sum(theta)) == THETA_DELTA


def test_theta_skein_split(theta, torus):
    # Δ_G = Δ_{G∖e1} + Δ_{G/e1}
    assert skein_eval(delete_edge(theta, "e1")) == parse_poly("2 - x y^-1 - x^-1 y", torus)
    assert skein_eval(theta) - skein_eval(delete_edge(theta, "e1")) == parse_poly("4 - x - x^-1 - y - y^-1", torus)


def test_cycle_shortcut(torus):
    edges = (
        Edge("a", "v1", "v2", -1, Monomial((1, 0))),
        Edge("b", "v2", "v3", 1, Monomial((0, 1))),
        Edge("c", "v3", "v1", 1, Monomial((1, 0))),
    )
    graph = SignedGraph(torus, ("v1", "v2", "v3"), edges)
    expected = -1 * parse_poly("2 - x^2 y - x^-2 y^-1", torus)
    assert skein_eval(graph) == expected
    assert determinant(laplacian_matrix(graph)) == expected


def test_isolated_vertex_kills_delta(theta):
    graph = SignedGraph(theta.variables, theta.vertices + ("lonely",), theta.edges)
    assert skein_eval(graph) == 0
    assert forman_sum(graph) == 0
    assert determinant(laplacian_matrix(graph)) == 0


def test_theta_crsfs(theta):
    found = crsf_enumerate(theta)
    assert [crsf.edge_ids for crsf in found] == [("e1", "e2"), ("e1", "e3"), ("e2", "e3")]
    assert [crsf.cycles for crsf in found] == [(Monomial((1, 0)),), (Monomial((0, 1)),), (Monomial((1, -1)),)]
    assert all(crsf.sign == 1 for crsf in found)


def test_two_loops_give_two_crsfs(torus):
    loops = (Edge("a", "v", "v", 1, Monomial((1, 0))), Edge("b", "v", "v", -1, Monomial((0, -2))))
    graph = SignedGraph(torus, ("v",), loops)
    found = crsf_enumerate(graph)
    assert [crsf.edge_ids for crsf in found] == [("a",), ("b",)]
    assert found[1].cycles == (Monomial((0, 2)),)
    assert forman_sum(graph) == parse_poly("2 - x - x^-1 - 2 + y^2 + y^-2", torus)


def test_tree_has_no_crsf(torus):
    one = Monomial.identity(torus)
    tree = SignedGraph(torus, ("a", "b", "c"), (Edge("e1", "a", "b", 1, one), Edge("e2", "b", "c", 1, one)))
    assert crsf_enumerate(tree) == []
    assert forman_sum(tree) == 0


def test_crsf_size_guard(theta):
    with pytest.raises(SizeGuardError, match="limited to 2 edges"):
        crsf_enumerate(theta, max_edges=2)


def test_unknown_method(theta):
    with pytest.raises(GraphError, match="unknown method"):
        delta(theta, "eigen")


@pytest.mark.parametrize("seed", range(10))
def test_parallel_evaluation_matches_sequential(seed):
    graph = random_graph(seed, 4, 7, 1, 2)
    assert crsf_enumerate(graph, workers=3) == crsf_enumerate(graph, workers=1)
    assert skein_eval(graph, workers=2) == skein_eval(graph, workers=1)


@pytest.mark.parametrize("seed", range(200))
def test_triple_agreement(seed):
    graph = random_graph(seed, 1 + seed % 5, seed % 8, seed % 3, 2)
    value = determinant(laplacian_matrix(graph))
    assert skein_eval(graph) == value
    assert forman_sum(graph) == value
    assert laplacian_matrix(graph).is_hermitian()
    assert bar(value) == value
    assert augment(value) == 0


@pytest.mark.parametrize("seed", range(50))
def test_disjoint_union_is_multiplicative(seed):
    genus = seed % 3
    first = random_graph(seed, 1 + seed % 3, seed % 5, genus, 2)
    second = random_graph(500 + seed, 1 + (seed + 1) % 3, (seed + 2) % 5, genus, 2)
    union = disjoint_union(first, second)
    assert delta(union) == delta(first) * delta(second)
    assert skein_eval(union) == skein_eval(first) * skein_eval(second)


def test_genus_zero_delta_vanishes():
    planar = VariableSet(0)
    one = Monomial.identity(planar)
    edges = tuple(Edge(f"e{i}", a, b, 1, one) for i, (a, b) in enumerate([("a", "b"), ("b", "c"), ("c", "a")], 1))
    # Без связностей все циклы тривиальны, поэтому Δ = 0
    assert delta(SignedGraph(planar, ("a", "b", "c"), edges)) == LaurentPoly.zero(planar)

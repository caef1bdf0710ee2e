import json
import random

import pytest

from surface_laplacian.cli import random_graph
from surface_laplacian.errors import GraphError, InputFormatError, MovePreconditionError
from surface_laplacian.graph import (
    Edge,
    MoveDirection,
    SignedGraph,
    components,
    contract_edge,
    cycle_connections,
    delete_edge,
    disjoint_union,
    gauge,
    graph_from_json,
    graph_json,
    rg1,
    rg2,
    rg3,
    spanning_forest,
    walk_connection,
)
from surface_laplacian.invariants import module_invariants
from surface_laplacian.laplacian import delta, laplacian_matrix
from surface_laplacian.ring import Monomial, sign_normalized


def connections(graph: SignedGraph) -> dict[str, str]:
    return {e.id: e.connection.to_string(graph.variables) for e in graph.edges}


def test_theta_from_file(theta):
    assert theta.vertices == ("v1", "v2")
    assert connections(theta) == {"e1": "1", "e2": "x^1", "e3": "y^1"}
    assert theta.degree("v1") == 3


def test_graph_validation(torus):
    one = Monomial.identity(torus)
    with pytest.raises(GraphError, match="duplicate edge id"):
        SignedGraph(torus, ("a", "b"), (Edge("e", "a", "b", 1, one), Edge("e", "b", "a", 1, one)))
    with pytest.raises(GraphError, match="unknown vertex"):
        SignedGraph(torus, ("a",), (Edge("e", "a", "b", 1, one),))
    with pytest.raises(GraphError, match="sign"):
        Edge("e", "a", "a", 0, one)
    with pytest.raises(GraphError, match="connection has 4 exponents"):
        SignedGraph(torus, ("a",), (Edge("e", "a", "a", 1, Monomial((0, 0, 0, 0))),))


def test_graph_file_errors():
    edge = {"id": "e", "tail": "a", "head": "a", "sign": 2}
    with pytest.raises(InputFormatError, match="edges.0.sign"):
        graph_from_json(json.dumps({"genus": 1, "vertices": ["a"], "edges": [edge]}))
    with pytest.raises(InputFormatError, match="bad.json"):
        graph_from_json("{not json", source="bad.json")


def test_integer_ids_accepted():
    graph = graph_from_json('{"genus": 0, "vertices": [1, 2], "edges": [{"id": 7, "tail": 1, "head": 2}]}')
    assert graph.vertices == ("1", "2")
    assert graph.edge("7").sign == 1


def test_graph_json_is_stable(theta):
    text = graph_json(theta)
    assert text.endswith("}\n")
    assert graph_json(graph_from_json(text)) == text


def test_delete_edge(theta):
    assert [e.id for e in delete_edge(theta, "e2").edges] == ["e1", "e3"]
    with pytest.raises(GraphError):
        delete_edge(theta, "e9")


def test_contract_trivial_edge(theta):
    contracted = contract_edge(theta, "e1")
    assert contracted.vertices == ("v1",)
    assert all(e.is_loop for e in contracted.edges)
    assert connections(contracted) == {"e2": "x^1", "e3": "y^1"}


def test_contract_gauges_the_head(theta):
    contracted = contract_edge(theta, "e2")
    assert connections(contracted) == {"e1": "x^-1", "e3": "x^-1 y^1"}


def test_contract_loop_rejected(load_graph):
    with pytest.raises(GraphError, match="cannot contract loop"):
        contract_edge(load_graph("satellite"), "e1")


def test_gauge_preserves_cycles_and_delta(theta):
    unit = Monomial((2, -1))
    gauged = gauge(theta, "v2", unit)
    assert connections(gauged) == {"e1": "x^2 y^-1", "e2": "x^3 y^-1", "e3": "x^2"}
    assert cycle_connections(gauged) == cycle_connections(theta)
    assert delta(gauged) == delta(theta)


@pytest.mark.parametrize("seed", range(20))
def test_gauge_invariance_random(seed):
    rng = random.Random(seed)
    graph = random_graph(seed, 4, 6, 2, 2)
    vertex = rng.choice(graph.vertices)
    unit = Monomial(tuple(rng.randint(-2, 2) for _ in range(4)))
    assert delta(gauge(graph, vertex, unit)) == delta(graph)
    assert cycle_connections(gauge(graph, vertex, unit)) == cycle_connections(graph)


def test_cycle_connections_of_theta(theta):
    forest = spanning_forest(theta)
    assert forest == ["e1"]
    cycles = cycle_connections(theta, forest)
    assert {key: m.to_string(theta.variables) for key, m in cycles.items()} == {"e2": "x^1", "e3": "y^1"}


def test_spanning_forest_prefers_edges(theta):
    assert spanning_forest(theta, prefer=["e3"]) == ["e3"]


def test_walk_connection(theta):
    assert walk_connection(theta, "v1", ["e2", "e3"]) == Monomial((1, -1))
    with pytest.raises(GraphError, match="not closed"):
        walk_connection(theta, "v1", ["e2"])


def test_components_and_union(theta, load_graph):
    union = disjoint_union(theta, load_graph("edgeless"))
    parts = components(union)
    assert [part.vertices for part in parts] == [("1.v1", "1.v2"), ("2.v1",), ("2.v2",)]
    assert len(parts[0].edges) == 3


def test_rg1_remove_requires_degree_one(theta):
    with pytest.raises(MovePreconditionError, match="degree must be 1"):
        rg1(theta, "v1")


def test_rg1_add_then_remove(theta):
    grown = rg1(theta, "w", MoveDirection.ADD, anchor="v2", sign=-1, connection=Monomial((0, 1)))
    assert grown.vertices == ("v1", "v2", "w")
    assert grown.edge("e4").sign == -1
    assert sign_normalized(delta(grown)) == sign_normalized(delta(theta))
    assert rg1(grown, "w") == theta


def test_rg1_add_requires_anchor(theta):
    with pytest.raises(MovePreconditionError, match="anchor"):
        rg1(theta, "w", MoveDirection.ADD)


def test_rg2_keeps_laplacian(theta):
    connection = Monomial((2, 0))
    grown = rg2(theta, "v1", "v2", 1, connection)
    assert [(e.id, e.sign) for e in grown.edges[3:]] == [("e4", 1), ("e5", -1)]
    assert laplacian_matrix(grown).entries == laplacian_matrix(theta).entries
    assert rg2(grown, "v1", "v2", 1, connection, MoveDirection.REMOVE) == theta


def test_rg2_loop_pair_matches_either_orientation(theta):
    grown = rg2(theta, "v1", "v1", -1, Monomial((1, 1)))
    assert rg2(grown, "v1", "v1", -1, Monomial((-1, -1)), MoveDirection.REMOVE) == theta


def test_rg2_remove_needs_a_pair(theta):
    with pytest.raises(MovePreconditionError, match="no parallel pair"):
        rg2(theta, "v1", "v2", 1, Monomial((1, 0)), MoveDirection.REMOVE)


def test_rg3_on_star(load_graph):
    star = load_graph("star")
    moved = rg3(star, "c")
    assert moved.vertices == ("w1", "w2", "w3")
    triangle = {e.id: (e.tail, e.head, e.sign, e.connection.to_string(moved.variables)) for e in moved.edges[1:]}
    assert triangle == {
        "e5": ("w1", "w2", 1, "x^-1 y^1"),
        "e6": ("w1", "w3", 1, "x^-1"),
        "e7": ("w2", "w3", -1, "y^-1"),
    }
    assert delta(moved) == -delta(star)
    assert module_invariants(moved) == module_invariants(star)


def test_rg3_preconditions(theta, load_graph):
    with pytest.raises(MovePreconditionError, match="distinct"):
        rg3(theta, "v1")
    star = load_graph("star")
    with pytest.raises(MovePreconditionError, match="degree 3"):
        rg3(star, "w1")


def _with_star(graph: SignedGraph, rng: random.Random, signs: tuple[int, int, int]) -> SignedGraph:
    neighbours = rng.sample(graph.vertices, 3)
    ids = graph.fresh_ids("s", 3)
    star = tuple(
        Edge(edge_id, "c", w, sign, Monomial(tuple(rng.randint(-2, 2) for _ in range(graph.variables.size))))
        for edge_id, w, sign in zip(ids, neighbours, signs)
    )
    return SignedGraph(graph.variables, graph.vertices + ("c",), graph.edges + star)


def _assert_invariant(before: SignedGraph, after: SignedGraph):
    assert sign_normalized(delta(before)) == sign_normalized(delta(after))
    assert module_invariants(before) == module_invariants(after)


@pytest.mark.parametrize("seed", range(40))
def test_moves_preserve_invariants(seed):
    rng = random.Random(1000 + seed)
    graph = random_graph(seed, 3 + seed % 3, seed % 6, 1 + seed % 2, 2)
    size = graph.variables.size
    connection = Monomial(tuple(rng.randint(-2, 2) for _ in range(size)))

    anchor = rng.choice(graph.vertices)
    grown = rg1(graph, "w", MoveDirection.ADD, anchor=anchor, sign=rng.choice((1, -1)), connection=connection)
    _assert_invariant(graph, grown)
    assert rg1(grown, "w") == graph

    first, second = rng.choice(graph.vertices), rng.choice(graph.vertices)
    doubled = rg2(graph, first, second, rng.choice((1, -1)), connection, edge_ids=["p1", "p2"])
    _assert_invariant(graph, doubled)
    assert laplacian_matrix(doubled).entries == laplacian_matrix(graph).entries

    signs = rng.choice(((1, -1, -1), (-1, 1, 1), (-1, 1, -1), (1, 1, -1)))
    starred = _with_star(graph, rng, signs)
    _assert_invariant(starred, rg3(starred, "c"))


@pytest.mark.parametrize("seed", range(60))
def test_contraction_keeps_cycle_connections(seed):
    graph = random_graph(seed, 4, 4, 1 + seed % 2, 2)
    for edge in graph.edges:
        if edge.is_loop:
            continue
        contracted = contract_edge(graph, edge.id)
        assert len(contracted.vertices) == len(graph.vertices) - 1
        assert len(contracted.edges) == len(graph.edges) - 1

        forest = spanning_forest(graph, prefer=[edge.id])
        assert edge.id in forest
        rest = [edge_id for edge_id in forest if edge_id != edge.id]
        assert cycle_connections(contracted, rest) == cycle_connections(graph, forest)

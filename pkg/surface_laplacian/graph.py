"""Signed graphs with connections: gauge, deletion/contraction and Reidemeister graph moves."""

import json
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import networkx as nx
from pydantic import ValidationError

from surface_laplacian.errors import GraphError, InputFormatError, MovePreconditionError
from surface_laplacian.models import EdgeRecord, GraphFile
from surface_laplacian.ring import Monomial, VariableSet, parse_monomial

logger = logging.getLogger(__name__)


class MoveDirection(str, Enum):
    """Направление хода: добавить или удалить конфигурацию."""

    ADD = "add"
    REMOVE = "remove"


@dataclass(frozen=True)
class Edge:
    """Ребро со знаком σ_e и связностью φ_e, читаемой в направлении tail -> head."""

    id: str
    tail: str
    head: str
    sign: int
    connection: Monomial

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise GraphError(f"edge {self.id}: sign must be +1 or -1, got {self.sign}")

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def other_end(self, vertex: str) -> str:
        return self.head if vertex == self.tail else self.tail

    def connection_from(self, vertex: str) -> Monomial:
        """Связность ребра, прочитанная от вершины vertex (обратный моном при чтении head -> tail)."""
        if vertex == self.tail:
            return self.connection
        if vertex == self.head:
            return self.connection.inverse()
        raise GraphError(f"vertex {vertex} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class SignedGraph:
    """
    Знаковый граф со связностями на поверхности рода g.

    Петли и кратные рёбра допускаются. Граф неизменяем: все операции возвращают новый граф.
    """

    variables: VariableSet
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("vertex ids must be unique")
        known = set(self.vertices)
        seen: set[str] = set()
        for edge in self.edges:
            if edge.id in seen:
                raise GraphError(f"duplicate edge id {edge.id}")
            seen.add(edge.id)
            for end in (edge.tail, edge.head):
                if end not in known:
                    raise GraphError(f"edge {edge.id} references unknown vertex {end}")
            if len(edge.connection) != self.variables.size:
                raise GraphError(
                    f"edge {edge.id}: connection has {len(edge.connection)} exponents, genus {self.variables.genus} needs {self.variables.size}"
                )

    # Доступ к данным

    def edge(self, edge_id: str) -> Edge:
        for edge in self.edges:
            if edge.id == edge_id:
                return edge
        raise GraphError(f"unknown edge id {edge_id}")

    def require_vertex(self, vertex: str) -> None:
        if vertex not in self.vertices:
            raise GraphError(f"unknown vertex {vertex}")

    def incident_edges(self, vertex: str) -> list[Edge]:
        return [e for e in self.edges if vertex in (e.tail, e.head)]

    def degree(self, vertex: str) -> int:
        """Степень вершины (петля считается дважды)."""
        return sum(2 if e.is_loop else 1 for e in self.incident_edges(vertex))

    def to_multigraph(self) -> nx.MultiGraph:
        """Неориентированный мультиграф networkx; ключи рёбер - их id."""
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(self.vertices)
        for edge in self.edges:
            multigraph.add_edge(edge.tail, edge.head, key=edge.id)
        return multigraph

    def fresh_ids(self, prefix: str, count: int, taken: Iterable[str] = ()) -> list[str]:
        """Новые id вида prefix1, prefix2, ..., не занятые ни вершинами, ни рёбрами."""
        used = set(self.vertices) | {e.id for e in self.edges} | set(taken)
        result = []
        n = 1
        while len(result) < count:
            candidate = f"{prefix}{n}"
            if candidate not in used:
                result.append(candidate)
                used.add(candidate)
            n += 1
        return result


def delete_edge(graph: SignedGraph, edge_id: str) -> SignedGraph:
    """Удаляет ребро; вершины не меняются."""
    graph.edge(edge_id)
    return replace(graph, edges=tuple(e for e in graph.edges if e.id != edge_id))


def gauge(graph: SignedGraph, vertex: str, unit: Monomial) -> SignedGraph:
    """
    Калибровочное преобразование в вершине.

    Рёбра, выходящие из vertex, умножаются на unit^-1, входящие - на unit.
    Петли при vertex не меняются. Связности циклов и Δ_G сохраняются.
    """
    graph.require_vertex(vertex)
    inverse = unit.inverse()
    edges = []
    for edge in graph.edges:
        connection = edge.connection
        if edge.tail == vertex:
            connection = connection * inverse
        if edge.head == vertex:
            connection = connection * unit
        edges.append(replace(edge, connection=connection))
    return replace(graph, edges=tuple(edges))


def contract_edge(graph: SignedGraph, edge_id: str) -> SignedGraph:
    """
    Стягивает ребро, не являющееся петлёй.

    Сначала калибровка в head(e), после которой φ_e = 1, затем e удаляется и head(e)
    склеивается с tail(e). Параллельные рёбра становятся петлями со связностями исходных циклов.
    """
    edge = graph.edge(edge_id)
    if edge.is_loop:
        raise GraphError(f"cannot contract loop {edge_id}")
    gauged = gauge(graph, edge.head, edge.connection.inverse())
    merged, kept = edge.head, edge.tail
    edges = []
    for other in gauged.edges:
        if other.id == edge_id:
            continue
        edges.append(
            replace(
                other,
                tail=kept if other.tail == merged else other.tail,
                head=kept if other.head == merged else other.head,
            )
        )
    vertices = tuple(v for v in graph.vertices if v != merged)
    return SignedGraph(graph.variables, vertices, tuple(edges))


def disjoint_union(first: SignedGraph, second: SignedGraph) -> SignedGraph:
    """Дизъюнктное объединение; id получают префиксы "1." и "2."."""
    first.variables.require_same(second.variables)
    vertices: list[str] = []
    edges: list[Edge] = []
    for tag, graph in (("1", first), ("2", second)):
        vertices.extend(f"{tag}.{v}" for v in graph.vertices)
        edges.extend(
            replace(e, id=f"{tag}.{e.id}", tail=f"{tag}.{e.tail}", head=f"{tag}.{e.head}") for e in graph.edges
        )
    return SignedGraph(first.variables, tuple(vertices), tuple(edges))


def components(graph: SignedGraph) -> list[SignedGraph]:
    """Компоненты связности в порядке первой вершины."""
    multigraph = graph.to_multigraph()
    result = []
    for vertex_set in sorted(nx.connected_components(multigraph), key=lambda c: min(graph.vertices.index(v) for v in c)):
        vertices = tuple(v for v in graph.vertices if v in vertex_set)
        edges = tuple(e for e in graph.edges if e.tail in vertex_set)
        result.append(SignedGraph(graph.variables, vertices, edges))
    return result


def spanning_forest(graph: SignedGraph, prefer: Sequence[str] = ()) -> list[str]:
    """
    Остовный лес (id рёбер); рёбра из prefer берутся в первую очередь.

    Args:
        graph: Граф
        prefer: Рёбра, которые нужно по возможности включить в лес

    Returns:
        Список id рёбер леса
    """
    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(graph.vertices)
    preferred = set(prefer)
    for edge in graph.edges:
        if not edge.is_loop:
            multigraph.add_edge(edge.tail, edge.head, key=edge.id, weight=0 if edge.id in preferred else 1)
    return [key for _, _, key in nx.minimum_spanning_edges(multigraph, algorithm="kruskal", keys=True, data=False)]


def walk_connection(graph: SignedGraph, start: str, edge_ids: Sequence[str]) -> Monomial:
    """Связность замкнутого пути: произведение φ^{±1} по рёбрам в порядке обхода."""
    current = start
    total = Monomial.identity(graph.variables)
    for edge_id in edge_ids:
        edge = graph.edge(edge_id)
        total = total * edge.connection_from(current)
        current = edge.other_end(current)
    if current != start:
        raise GraphError(f"walk from {start} ends at {current}, not closed")
    return total


def cycle_connections(graph: SignedGraph, forest: Optional[Sequence[str]] = None) -> dict[str, Monomial]:
    """
    Связности фундаментальных циклов относительно остовного леса.

    Для каждого ребра f вне леса возвращается связность цикла "f, затем путь по лесу назад",
    прочитанная от tail(f).
    """
    forest_ids = list(forest) if forest is not None else spanning_forest(graph)
    tree = nx.Graph()
    tree.add_nodes_from(graph.vertices)
    for edge_id in forest_ids:
        edge = graph.edge(edge_id)
        tree.add_edge(edge.tail, edge.head, key=edge_id)

    # Потенциалы вершин: связность пути от корня компоненты по лесу
    potential: dict[str, Monomial] = {}
    for root in graph.vertices:
        if root in potential:
            continue
        potential[root] = Monomial.identity(graph.variables)
        for parent, child in nx.bfs_edges(tree, root):
            edge = graph.edge(tree.edges[parent, child]["key"])
            potential[child] = potential[parent] * edge.connection_from(parent)

    in_forest = set(forest_ids)
    return {
        edge.id: potential[edge.tail] * edge.connection * potential[edge.head].inverse()
        for edge in graph.edges
        if edge.id not in in_forest
    }


# Ходы Рейдемейстера на графах


def rg1(
    graph: SignedGraph,
    vertex: str,
    direction: MoveDirection = MoveDirection.REMOVE,
    *,
    anchor: Optional[str] = None,
    sign: int = 1,
    connection: Optional[Monomial] = None,
    edge_id: Optional[str] = None,
) -> SignedGraph:
    """
    Первый ход: висячая вершина и её ребро.

    Args:
        graph: Граф
        vertex: Висячая вершина w (удаляемая или добавляемая)
        direction: add или remove
        anchor: Вершина, к которой присоединяется w (только для add)
        sign: Знак нового ребра (любой)
        connection: Связность нового ребра anchor -> w (по умолчанию 1)
        edge_id: Id нового ребра (по умолчанию свободный e<n>)

    Returns:
        Граф после хода

    Raises:
        MovePreconditionError: Если степень w не равна 1 (remove) или id заняты (add)
    """
    if direction == MoveDirection.REMOVE:
        graph.require_vertex(vertex)
        incident = graph.incident_edges(vertex)
        if len(incident) != 1 or incident[0].is_loop:
            raise MovePreconditionError(f"rg1: degree must be 1 at {vertex}, found degree {graph.degree(vertex)}")
        logger.debug(f"rg1 remove {vertex} with edge {incident[0].id}")
        return SignedGraph(
            graph.variables,
            tuple(v for v in graph.vertices if v != vertex),
            tuple(e for e in graph.edges if e.id != incident[0].id),
        )

    if anchor is None:
        raise MovePreconditionError("rg1: add requires an anchor vertex")
    graph.require_vertex(anchor)
    if vertex in graph.vertices:
        raise MovePreconditionError(f"rg1: vertex {vertex} already exists")
    edge_id = edge_id or graph.fresh_ids("e", 1, taken=[vertex])[0]
    if any(e.id == edge_id for e in graph.edges):
        raise MovePreconditionError(f"rg1: edge id {edge_id} already exists")
    if connection is None:
        connection = Monomial.identity(graph.variables)
    new_edge = Edge(edge_id, anchor, vertex, sign, connection)
    return SignedGraph(graph.variables, graph.vertices + (vertex,), graph.edges + (new_edge,))


def _matches(edge: Edge, first: str, second: str, connection: Monomial) -> bool:
    if {edge.tail, edge.head} != {first, second}:
        return False
    if edge.is_loop:
        # Вклад петли не зависит от её ориентации
        return edge.connection in (connection, connection.inverse())
    return edge.connection_from(first) == connection


def rg2(
    graph: SignedGraph,
    first: str,
    second: str,
    sign: int,
    connection: Monomial,
    direction: MoveDirection = MoveDirection.ADD,
    *,
    edge_ids: Optional[Sequence[str]] = None,
) -> SignedGraph:
    """
    Второй ход в форме пары параллельных рёбер с равными связностями и противоположными знаками.

    first == second допускается (пара петель). Матрица Лапласа не меняется поэлементно.
    """
    graph.require_vertex(first)
    graph.require_vertex(second)
    if sign not in (1, -1):
        raise MovePreconditionError(f"rg2: sign must be +1 or -1, got {sign}")

    if direction == MoveDirection.ADD:
        ids = list(edge_ids) if edge_ids else graph.fresh_ids("e", 2)
        if len(ids) != 2 or any(e.id in ids for e in graph.edges) or ids[0] == ids[1]:
            raise MovePreconditionError("rg2: need two new distinct edge ids")
        pair = (
            Edge(ids[0], first, second, sign, connection),
            Edge(ids[1], first, second, -sign, connection),
        )
        return replace(graph, edges=graph.edges + pair)

    positive = [e for e in graph.edges if e.sign == sign and _matches(e, first, second, connection)]
    negative = [e for e in graph.edges if e.sign == -sign and _matches(e, first, second, connection)]
    if not positive or not negative:
        raise MovePreconditionError(
            f"rg2: no parallel pair with opposite signs and equal connection between {first} and {second}"
        )
    removed = {min(positive, key=lambda e: e.id).id, min(negative, key=lambda e: e.id).id}
    logger.debug(f"rg2 remove pair {sorted(removed)}")
    return replace(graph, edges=tuple(e for e in graph.edges if e.id not in removed))


def rg3(graph: SignedGraph, vertex: str, *, edge_ids: Optional[Sequence[str]] = None) -> SignedGraph:
    """
    Третий ход: звезда степени 3 заменяется треугольником.

    Вершина v со знаками (+1, -1, -1) на рёбрах к различным соседям w1, w2, w3 (w1 - конец ребра
    с отличающимся знаком) заменяется треугольником w1-w2 (+1, φ1^-1 φ2), w1-w3 (+1, φ1^-1 φ3),
    w2-w3 (-1, φ2^-1 φ3), где φi - связность v -> wi. Для зеркального набора (-1, +1, +1)
    знаки треугольника меняются на противоположные.
    """
    graph.require_vertex(vertex)
    incident = graph.incident_edges(vertex)
    if len(incident) != 3 or any(e.is_loop for e in incident):
        raise MovePreconditionError(f"rg3: vertex {vertex} must have degree 3 and no loops")
    neighbours = [e.other_end(vertex) for e in incident]
    if len(set(neighbours)) != 3:
        raise MovePreconditionError(f"rg3: neighbours of {vertex} must be distinct")

    positives = [e for e in incident if e.sign == 1]
    negatives = [e for e in incident if e.sign == -1]
    if len(positives) == 1:
        odd, rest, orientation = positives[0], negatives, 1
    elif len(negatives) == 1:
        odd, rest, orientation = negatives[0], positives, -1
    else:
        raise MovePreconditionError(f"rg3: sign pattern at {vertex} must be (+1,-1,-1) or (-1,+1,+1)")

    w1, w2, w3 = (e.other_end(vertex) for e in (odd, *rest))
    phi1, phi2, phi3 = (e.connection_from(vertex) for e in (odd, *rest))
    ids = list(edge_ids) if edge_ids else graph.fresh_ids("e", 3)
    if len(ids) != 3 or len(set(ids)) != 3:
        raise MovePreconditionError("rg3: need three new distinct edge ids")
    removed = {e.id for e in incident}
    if any(e.id in ids for e in graph.edges if e.id not in removed):
        raise MovePreconditionError("rg3: new edge ids collide with existing edges")

    triangle = (
        Edge(ids[0], w1, w2, orientation, phi1.inverse() * phi2),
        Edge(ids[1], w1, w3, orientation, phi1.inverse() * phi3),
        Edge(ids[2], w2, w3, -orientation, phi2.inverse() * phi3),
    )
    logger.debug(f"rg3 at {vertex}: neighbours {w1}, {w2}, {w3}")
    return SignedGraph(
        graph.variables,
        tuple(v for v in graph.vertices if v != vertex),
        tuple(e for e in graph.edges if e.id not in removed) + triangle,
    )


# Файловый формат


def graph_from_file(data: GraphFile) -> SignedGraph:
    """Строит граф из провалидированной модели файла."""
    variables = VariableSet(data.genus)
    edges = tuple(
        Edge(record.id, record.tail, record.head, record.sign, parse_monomial(record.connection, variables))
        for record in data.edges
    )
    return SignedGraph(variables, tuple(data.vertices), edges)


def graph_to_file(graph: SignedGraph) -> GraphFile:
    return GraphFile(
        genus=graph.variables.genus,
        vertices=list(graph.vertices),
        edges=[
            EdgeRecord(
                id=e.id,
                tail=e.tail,
                head=e.head,
                sign=e.sign,
                connection=e.connection.to_string(graph.variables),
            )
            for e in graph.edges
        ],
    )


def graph_json(graph: SignedGraph) -> str:
    """Каноническая JSON-запись графа (отступ 2, перевод строки в конце)."""
    return json.dumps(graph_to_file(graph).model_dump(), indent=2, ensure_ascii=False) + "\n"


def graph_from_json(data: Union[str, bytes], source: Optional[str] = None) -> SignedGraph:
    """
    Разбирает JSON-файл графа.

    Raises:
        InputFormatError: Если файл не проходит валидацию GraphFile
    """
    try:
        model = GraphFile.model_validate_json(data)
    except ValidationError as exc:
        raise InputFormatError.from_validation(exc, source) from exc
    return graph_from_file(model)

"""Checkerboard-colored link diagrams: colorability, medial signed graph and dual signs."""

import logging
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Union

import networkx as nx
from pydantic import ValidationError

from surface_laplacian.errors import ColorabilityError, DiagramError, InputFormatError
from surface_laplacian.graph import Edge, SignedGraph
from surface_laplacian.models import DiagramFile
from surface_laplacian.ring import Monomial, VariableSet, parse_monomial

logger = logging.getLogger(__name__)

# Безымянная область семейства ℓ_{k,l,m} (единственная грань тета-графа на торе)
FAMILY_FACE = "f"


@dataclass(frozen=True)
class Region:
    id: str
    shaded: bool = False


@dataclass(frozen=True)
class Crossing:
    """Перекрёсток: ребро медиального графа между закрашенными областями a и b."""

    a: str
    b: str
    sign: int
    connection: Monomial
    id: Optional[str] = None


@dataclass(frozen=True)
class DiagramSpec:
    """
    Диаграмма на поверхности рода g.

    arcs - рёбра универсума |D| как пары соседних областей; дуга не может граничить
    с одной и той же областью с обеих сторон.
    """

    variables: VariableSet
    regions: tuple[Region, ...]
    arcs: tuple[tuple[str, str], ...] = ()
    crossings: tuple[Crossing, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "arcs", tuple(tuple(arc) for arc in self.arcs))
        object.__setattr__(self, "crossings", tuple(self.crossings))
        ids = [r.id for r in self.regions]
        if len(set(ids)) != len(ids):
            raise DiagramError("region ids must be unique")
        known = set(ids)
        for first, second in self.arcs:
            if first not in known or second not in known:
                raise DiagramError(f"arc [{first}, {second}] references an unknown region")
            if first == second:
                raise DiagramError(f"arc [{first}, {second}] joins region {first} to itself")
        for crossing in self.crossings:
            for end in (crossing.a, crossing.b):
                if end not in known:
                    raise DiagramError(f"crossing references unknown region {end}")
            if crossing.sign not in (1, -1):
                raise DiagramError(f"crossing sign must be +1 or -1, got {crossing.sign}")

    @property
    def genus(self) -> int:
        return self.variables.genus

    def shaded(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.regions if r.shaded)


@dataclass(frozen=True)
class CheckerboardReport:
    """Результат проверки: две взаимно дополнительные раскраски или нечётный цикл."""

    colorable: bool
    shadings: tuple[frozenset[str], ...] = ()    # Множества закрашенных областей (0 или 2)
    odd_cycle: tuple[str, ...] = ()              # Свидетель: области нечётного цикла в порядке обхода


def _tree_path(parent: Mapping[str, Optional[str]], vertex: str) -> list[str]:
    path = [vertex]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def check_checkerboard(regions: Sequence[str], arcs: Sequence[tuple[str, str]]) -> CheckerboardReport:
    """
    Проверка шахматной раскрашиваемости: двудольность мультиграфа смежности областей.

    Первая раскраска закрашивает первую область каждой компоненты связности,
    вторая раскраска дополнительна к первой.

    Args:
        regions: Id областей в порядке файла
        arcs: Пары соседних областей (по одной на дугу универсума)

    Returns:
        CheckerboardReport
    """
    known = set(regions)
    for first, second in arcs:
        for region in (first, second):
            if region not in known:
                raise DiagramError(f"arc [{first}, {second}] names unknown region {region}")
    for first, second in arcs:
        if first == second:
            return CheckerboardReport(False, odd_cycle=(first,))

    adjacency = nx.Graph()
    adjacency.add_nodes_from(regions)
    adjacency.add_edges_from(arcs)

    color: dict[str, int] = {}
    parent: dict[str, Optional[str]] = {}
    for root in regions:
        if root in color:
            continue
        color[root], parent[root] = 0, None
        for u, v in nx.bfs_edges(adjacency, root):
            color[v], parent[v] = 1 - color[u], u

    for u, v in adjacency.edges():
        if color[u] != color[v]:
            continue
        up, vp = _tree_path(parent, u), _tree_path(parent, v)
        common = next(w for w in up if w in set(vp))
        cycle = up[: up.index(common) + 1] + list(reversed(vp[: vp.index(common)]))
        logger.debug(f"odd cycle through arc [{u}, {v}]: {cycle}")
        return CheckerboardReport(False, odd_cycle=tuple(cycle))

    first = frozenset(r for r in regions if color[r] == 0)
    return CheckerboardReport(True, shadings=(first, frozenset(regions) - first))


def medial_graph(diagram: DiagramSpec) -> SignedGraph:
    """
    Медиальный знаковый граф: вершины - закрашенные области, рёбра - перекрёстки.

    Raises:
        ColorabilityError: Если диаграмма не раскрашивается в шахматном порядке
        DiagramError: Если раскраска файла не шахматная или перекрёсток ссылается на незакрашенную область
    """
    ids = [r.id for r in diagram.regions]
    report = check_checkerboard(ids, diagram.arcs)
    if not report.colorable:
        raise ColorabilityError("diagram is not checkerboard colorable", report.odd_cycle)

    shaded = set(diagram.shaded())
    for first, second in diagram.arcs:
        if (first in shaded) == (second in shaded):
            raise DiagramError(f"arc [{first}, {second}] separates two regions of the same shading")

    explicit = {c.id for c in diagram.crossings if c.id is not None}
    number = 0
    edges = []
    for crossing in diagram.crossings:
        for end in (crossing.a, crossing.b):
            if end not in shaded:
                raise DiagramError(f"crossing references unshaded region {end}")
        edge_id = crossing.id
        while edge_id is None or (crossing.id is None and edge_id in explicit):
            number += 1
            edge_id = f"e{number}"
        edges.append(Edge(edge_id, crossing.a, crossing.b, crossing.sign, crossing.connection))
    return SignedGraph(diagram.variables, diagram.shaded(), tuple(edges))


def dual_signs(
    graph: SignedGraph,
    skeleton: SignedGraph,
    pairing: Optional[Mapping[str, str]] = None,
) -> SignedGraph:
    """
    Дуальный граф G* со знаками w_{e*} = -w_e.

    Вершины, инцидентность и связности берутся из skeleton без изменений.

    Args:
        graph: Исходный граф G
        skeleton: Каркас G* (вершины, рёбра, связности)
        pairing: Id ребра G -> id дуального ребра; по умолчанию рёбра сопоставляются по порядку

    Raises:
        DiagramError: Если сопоставление рёбер не является биекцией
    """
    graph.variables.require_same(skeleton.variables)
    if pairing is None:
        if len(graph.edges) != len(skeleton.edges):
            raise DiagramError(
                f"edge bijection is not total: {len(graph.edges)} edges vs {len(skeleton.edges)} dual edges"
            )
        pairing = {e.id: d.id for e, d in zip(graph.edges, skeleton.edges)}

    primal_ids = {e.id for e in graph.edges}
    dual_ids = {d.id for d in skeleton.edges}
    if set(pairing) != primal_ids or sorted(pairing.values()) != sorted(dual_ids):
        raise DiagramError("edge bijection is not total")

    dual_sign = {pairing[e.id]: -e.sign for e in graph.edges}
    return replace(skeleton, edges=tuple(replace(d, sign=dual_sign[d.id]) for d in skeleton.edges))


# Семейство ℓ_{k,l,m}: тета-граф на торе с подразделёнными рёбрами


def _family_sites(k: int, l: int, m: int, variables: VariableSet) -> list[tuple[str, int, Monomial, Monomial]]:
    """(метка, число подразделений, связность ребра G, связность дуальной петли) в порядке рёбер тета-графа."""
    for name, value in (("k", k), ("l", l), ("m", m)):
        if value == 0:
            raise DiagramError(f"{name} must be nonzero")
    x = Monomial.generator(variables, "x")
    y = Monomial.generator(variables, "y")
    one = Monomial.identity(variables)
    return [
        ("m", m, one, x.inverse() * y),
        ("l", l, x, y),
        ("k", k, y, x),
    ]


def family_diagram(k: int, l: int, m: int) -> DiagramSpec:
    """
    Диаграмма зацепления ℓ_{k,l,m} на торе.

    Рёбра тета-графа со связностями 1, x, y подразделены |m|, |l|, |k| раз; знак рёбер пути
    равен знаку соответствующего числа. Связность ребра стоит на первом отрезке пути,
    внутренние вершины пути - закрашенные области.
    """
    variables = VariableSet(1)
    sites = _family_sites(k, l, m, variables)
    one = Monomial.identity(variables)
    regions = [Region("v1", True), Region("v2", True)]
    crossings = []
    for label, count, connection, _ in sites:
        inner = [f"{label}{i}" for i in range(1, abs(count))]
        regions.extend(Region(r, True) for r in inner)
        path = ["v1", *inner, "v2"]
        sign = 1 if count > 0 else -1
        for position, (a, b) in enumerate(zip(path, path[1:])):
            crossings.append(Crossing(a, b, sign, connection if position == 0 else one))
    regions.append(Region(FAMILY_FACE, False))

    degree: dict[str, int] = {r.id: 0 for r in regions}
    for crossing in crossings:
        degree[crossing.a] += 1
        degree[crossing.b] += 1
    arcs = [(r.id, FAMILY_FACE) for r in regions if r.shaded for _ in range(degree[r.id])]
    return DiagramSpec(variables, tuple(regions), tuple(arcs), tuple(crossings))


def family_dual_skeleton(k: int, l: int, m: int) -> SignedGraph:
    """Дуальный граф ℓ_{k,l,m}: одна вершина, |m| петель x^-1 y, |l| петель y, |k| петель x со знаками k, l, m."""
    variables = VariableSet(1)
    edges = []
    for _, count, _, loop in _family_sites(k, l, m, variables):
        sign = 1 if count > 0 else -1
        for _ in range(abs(count)):
            edges.append(Edge(f"e{len(edges) + 1}", FAMILY_FACE, FAMILY_FACE, sign, loop))
    return SignedGraph(variables, (FAMILY_FACE,), tuple(edges))


def diagram_from_file(data: DiagramFile) -> DiagramSpec:
    """Строит диаграмму из провалидированной модели файла."""
    variables = VariableSet(data.genus)
    return DiagramSpec(
        variables,
        tuple(Region(r.id, r.shaded) for r in data.regions),
        tuple((a, b) for a, b in data.arcs),
        tuple(
            Crossing(c.a, c.b, c.sign, parse_monomial(c.connection, variables), c.id)
            for c in data.crossings
        ),
    )


def diagram_from_json(data: Union[str, bytes], source: Optional[str] = None) -> DiagramSpec:
    """Разбирает JSON-файл диаграммы."""
    try:
        model = DiagramFile.model_validate_json(data)
    except ValidationError as exc:
        raise InputFormatError.from_validation(exc, source) from exc
    return diagram_from_file(model)

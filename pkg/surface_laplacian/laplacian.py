"""Laplacian matrix L_G and the Laplacian polynomial Δ_G computed three independent ways."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from surface_laplacian.config import settings
from surface_laplacian.errors import GraphError, SizeGuardError
from surface_laplacian.graph import Edge, SignedGraph, components, contract_edge, delete_edge, walk_connection
from surface_laplacian.ring import LaurentPoly, Monomial, VariableSet, bar

logger = logging.getLogger(__name__)

METHODS = ("det", "skein", "forman")


@dataclass(frozen=True)
class LaplacianMatrix:
    """Квадратная матрица L_G над Λ; строки и столбцы идут в порядке вершин графа."""

    variables: VariableSet
    vertices: tuple[str, ...]
    entries: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def entry(self, i: int, j: int) -> LaurentPoly:
        return self.entries[i][j]

    def is_hermitian(self) -> bool:
        """Проверка entry(j, i) == bar(entry(i, j)) для всех i, j."""
        n = self.size
        return all(self.entries[j][i] == bar(self.entries[i][j]) for i in range(n) for j in range(i, n))

    def rows(self) -> list[list[str]]:
        """Канонические строки элементов по строкам."""
        return [[str(p) for p in row] for row in self.entries]


def loop_weight(variables: VariableSet, connection: Monomial) -> LaurentPoly:
    """Многочлен 2 - φ - φ^-1."""
    return LaurentPoly(variables, {(0,) * variables.size: 2}) - LaurentPoly(
        variables, {connection.exponents: 1}
    ) - LaurentPoly(variables, {connection.inverse().exponents: 1})


def laplacian_matrix(graph: SignedGraph) -> LaplacianMatrix:
    """
    Матрица Лапласа в ориентации δ - A.

    Диагональ: сумма σ_e по инцидентным рёбрам, не являющимся петлями, плюс σ_e(2 - φ_e - φ_e^-1)
    по петлям. Вне диагонали: -Σ σ_e φ_e по рёбрам vi - vj, связность читается от vi к vj.

    Args:
        graph: Знаковый граф со связностями

    Returns:
        LaplacianMatrix размера |V_G|
    """
    variables = graph.variables
    n = len(graph.vertices)
    index = {v: i for i, v in enumerate(graph.vertices)}
    zero = LaurentPoly.zero(variables)
    cells = [[zero] * n for _ in range(n)]
    for edge in graph.edges:
        t, h = index[edge.tail], index[edge.head]
        if edge.is_loop:
            cells[t][t] = cells[t][t] + edge.sign * loop_weight(variables, edge.connection)
            continue
        cells[t][t] = cells[t][t] + edge.sign
        cells[h][h] = cells[h][h] + edge.sign
        cells[t][h] = cells[t][h] - LaurentPoly(variables, {edge.connection.exponents: edge.sign})
        cells[h][t] = cells[h][t] - LaurentPoly(variables, {edge.connection.inverse().exponents: edge.sign})
    return LaplacianMatrix(variables, graph.vertices, tuple(tuple(row) for row in cells))


def determinant(matrix: LaplacianMatrix) -> LaurentPoly:
    """
    Точный определитель разложением по строкам с мемоизацией по подмножествам столбцов.

    Деления не требуется, поэтому вычисление идёт прямо в Λ: O(2^n * n) операций кольца.
    """
    n = matrix.size
    one = LaurentPoly.constant(matrix.variables, 1)
    cache: dict[int, LaurentPoly] = {}

    def minor(mask: int) -> LaurentPoly:
        # mask - свободные столбцы; номер строки = n - число свободных столбцов
        row = n - bin(mask).count("1")
        if row == n:
            return one
        if mask in cache:
            return cache[mask]
        total = LaurentPoly.zero(matrix.variables)
        sign = 1
        for col in range(n):
            if not mask & (1 << col):
                continue
            entry = matrix.entries[row][col]
            if entry:
                term = entry * minor(mask & ~(1 << col))
                total = total + term if sign > 0 else total - term
            sign = -sign
        cache[mask] = total
        return total

    result = minor((1 << n) - 1)
    logger.debug(f"determinant of {n}x{n} matrix: {len(cache)} cached minors")
    return result


# Skein-рекурсия


def _cycle_order(graph: SignedGraph) -> list[str]:
    """Рёбра единственного цикла графа, все вершины которого имеют степень 2, в порядке обхода."""
    start = graph.vertices[0]
    order: list[str] = []
    current, previous = start, None
    while True:
        options = [e for e in graph.incident_edges(current) if e.id != previous]
        edge = options[0]
        order.append(edge.id)
        current, previous = edge.other_end(current), edge.id
        if current == start:
            return order


def _is_cycle(graph: SignedGraph) -> bool:
    return len(graph.edges) == len(graph.vertices) and all(graph.degree(v) == 2 for v in graph.vertices)


def _component_delta(component: SignedGraph, executor: Optional[ThreadPoolExecutor] = None) -> LaurentPoly:
    variables = component.variables
    if not component.edges:
        return LaurentPoly.zero(variables)
    non_loops = [e for e in component.edges if not e.is_loop]
    if not non_loops:
        total = LaurentPoly.zero(variables)
        for edge in component.edges:
            total = total + edge.sign * loop_weight(variables, edge.connection)
        return total
    if _is_cycle(component):
        order = _cycle_order(component)
        sign = 1
        for edge in component.edges:
            sign *= edge.sign
        return sign * loop_weight(variables, walk_connection(component, component.vertices[0], order))

    edge = min(non_loops, key=lambda e: e.id)
    deleted, contracted = delete_edge(component, edge.id), contract_edge(component, edge.id)
    if executor is not None:
        branches = [executor.submit(skein_eval, deleted, 1), executor.submit(skein_eval, contracted, 1)]
        without, with_edge = (future.result() for future in branches)
    else:
        without, with_edge = skein_eval(deleted, 1), skein_eval(contracted, 1)
    return without + edge.sign * with_edge


def skein_eval(graph: SignedGraph, workers: Optional[int] = None) -> LaurentPoly:
    """
    Δ_G по skein-соотношению Δ_G = Δ_{G∖e} + σ_e Δ_{G/e}.

    Граф раскладывается на компоненты (Δ мультипликативен). Базовые случаи: вершина без рёбер
    даёт 0, вершина с петлями - Σ σ_e(2 - φ_e - φ_e^-1), цикл - σ(2 - φ - φ^-1). Иначе
    рекурсия по не-петле с наименьшим id.

    Args:
        graph: Знаковый граф
        workers: Число потоков для двух ветвей верхнего шага (None - из настроек)

    Returns:
        Δ_G
    """
    workers = settings.parallel_workers if workers is None else workers
    result = LaurentPoly.constant(graph.variables, 1)
    for component in components(graph):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=2) as executor:
                value = _component_delta(component, executor)
        else:
            value = _component_delta(component)
        result = result * value
        if not result:
            break
    return result


# Циклически-укоренённые остовные леса (CRSF)


def oriented(monomial: Monomial) -> Monomial:
    """Ориентация связности цикла, при которой первый ненулевой показатель положителен."""
    for e in monomial.exponents:
        if e:
            return monomial if e > 0 else monomial.inverse()
    return monomial


@dataclass(frozen=True)
class Crsf:
    """Остовный подграф, каждая компонента которого содержит ровно один цикл."""

    edge_ids: tuple[str, ...]  # Рёбра F
    cycles: tuple[Monomial, ...]  # Связности циклов компонент (нормированная ориентация)
    sign: int  # Произведение σ_e по рёбрам F

    def weight(self, variables: VariableSet) -> LaurentPoly:
        """Вклад в формулу Формана: Π σ_e · Π (2 - φ - φ^-1)."""
        result = LaurentPoly.constant(variables, self.sign)
        for connection in self.cycles:
            result = result * loop_weight(variables, connection)
        return result


def _unicyclic_connection(component: SignedGraph) -> Monomial:
    # Срезаем висячие вершины, остаётся цикл
    core = component
    while True:
        leaves = [v for v in core.vertices if core.degree(v) == 1]
        if not leaves:
            break
        leaf = leaves[0]
        edge = core.incident_edges(leaf)[0]
        core = SignedGraph(
            core.variables,
            tuple(v for v in core.vertices if v != leaf),
            tuple(e for e in core.edges if e.id != edge.id),
        )
    order = _cycle_order(core)
    return oriented(walk_connection(core, core.vertices[0], order))


def _scan(graph: SignedGraph, head: int, size: int) -> list[Crsf]:
    """Все CRSF, у которых первое (по порядку) ребро имеет индекс head."""
    found = []
    tail_edges = graph.edges[head + 1 :]
    for rest in combinations(tail_edges, size - 1):
        crsf = _as_crsf(graph, (graph.edges[head],) + rest)
        if crsf is not None:
            found.append(crsf)
    return found


def _as_crsf(graph: SignedGraph, subset: Sequence[Edge]) -> Optional[Crsf]:
    spanning = SignedGraph(graph.variables, graph.vertices, tuple(subset))
    parts = components(spanning)
    if any(len(part.edges) != len(part.vertices) for part in parts):
        return None
    sign = 1
    for edge in subset:
        sign *= edge.sign
    return Crsf(tuple(e.id for e in subset), tuple(_unicyclic_connection(part) for part in parts), sign)


def crsf_enumerate(
    graph: SignedGraph,
    max_edges: Optional[int] = None,
    workers: Optional[int] = None,
) -> list[Crsf]:
    """
    Полный перебор CRSF: подмножества рёбер F с |F| = |V|, у которых каждая компонента
    содержит ровно один цикл.

    Args:
        graph: Знаковый граф
        max_edges: Ограничение на число рёбер (None - settings.crsf_max_edges)
        workers: Число потоков (None - settings.parallel_workers); порядок результата не зависит от него

    Returns:
        Список Crsf в лексикографическом порядке подмножеств рёбер

    Raises:
        SizeGuardError: Если рёбер больше max_edges
    """
    limit = settings.crsf_max_edges if max_edges is None else max_edges
    workers = settings.parallel_workers if workers is None else workers
    if len(graph.edges) > limit:
        raise SizeGuardError(f"CRSF enumeration is limited to {limit} edges, graph has {len(graph.edges)}")

    size = len(graph.vertices)
    if size == 0:
        return [Crsf((), (), 1)]
    heads = range(len(graph.edges) - size + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            chunks = list(executor.map(lambda head: _scan(graph, head, size), heads))
    else:
        chunks = [_scan(graph, head, size) for head in heads]
    result = [crsf for chunk in chunks for crsf in chunk]
    logger.debug(f"{len(result)} CRSFs among {len(graph.edges)} edges on {size} vertices")
    return result


def forman_sum(graph: SignedGraph, max_edges: Optional[int] = None, workers: Optional[int] = None) -> LaurentPoly:
    """Нормированный Δ_G по формуле Формана: сумма весов всех CRSF."""
    total = LaurentPoly.zero(graph.variables)
    for crsf in crsf_enumerate(graph, max_edges=max_edges, workers=workers):
        total = total + crsf.weight(graph.variables)
    return total


def delta(graph: SignedGraph, method: str = "det") -> LaurentPoly:
    """Δ_G выбранным методом: det, skein или forman."""
    if method == "det":
        return determinant(laplacian_matrix(graph))
    if method == "skein":
        return skein_eval(graph)
    if method == "forman":
        return forman_sum(graph)
    raise GraphError(f"unknown method {method!r}, expected one of {', '.join(METHODS)}")

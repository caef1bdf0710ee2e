"""Data models for graph files, diagram files and CLI reports."""

from typing import Annotated, Any, Literal, Optional

from pydantic import BaseModel, BeforeValidator, Field


def _as_id(value: Any) -> Any:
    # В JSON идентификаторы иногда записывают числами
    return str(value) if isinstance(value, int) and not isinstance(value, bool) else value


# Строковый идентификатор, допускающий целое число в JSON
Identifier = Annotated[str, BeforeValidator(_as_id)]


class EdgeRecord(BaseModel):
    """Ребро графа в файле."""

    id: Identifier                              # Уникальный id ребра
    tail: Identifier                            # Начало ребра (направление, в котором читается connection)
    head: Identifier                            # Конец ребра
    sign: Literal[1, -1] = 1                    # Знак σ_e (по умолчанию +1, как неподписанные рёбра на рисунках)
    connection: str = "1"                       # Моном связности φ_e, например "x^1 y^-1"


class GraphFile(BaseModel):
    """Файл знакового графа: {genus, vertices, edges}."""

    genus: int = Field(ge=0)                    # Род поверхности g
    vertices: list[Identifier]                  # Упорядоченный список вершин
    edges: list[EdgeRecord] = []                # Рёбра


class RegionRecord(BaseModel):
    """Область диаграммы."""

    id: Identifier                              # Id области
    shaded: bool = False                        # Закрашена ли область


class CrossingRecord(BaseModel):
    """Перекрёсток диаграммы: две закрашенные области, вес w_e и связность."""

    a: Identifier                               # Первая закрашенная область (начало ребра медиального графа)
    b: Identifier                               # Вторая закрашенная область
    sign: Literal[1, -1] = 1                    # Вес w_e
    connection: str = "1"                       # Связность ребра, читаемая от a к b
    id: Optional[Identifier] = None             # Id ребра медиального графа (по умолчанию e1, e2, ...)


class DiagramFile(BaseModel):
    """Файл диаграммы: {genus, regions, arcs, crossings}."""

    genus: int = Field(ge=0)                    # Род поверхности g
    regions: list[RegionRecord]                 # Области с флагом закраски
    arcs: list[tuple[Identifier, Identifier]] = []  # Дуги универсума |D|: пары соседних областей
    crossings: list[CrossingRecord] = []        # Перекрёстки


class RunReport(BaseModel):
    """Отчёт о запуске команды CLI."""

    command: str                                # Имя команды и существенные флаги
    input_digest: str                           # sha256 входных байтов (в порядке аргументов)
    status: Literal["OK", "PASS", "FAIL"] = "OK"  # Итог проверки
    results: dict[str, Any] = {}                # Канонические строки, инварианты, сертификаты
    timing_ms: Optional[float] = None           # Время выполнения (только с --timing)

"""Exceptions raised by surface_laplacian."""

from typing import Optional, Sequence

from pydantic import ValidationError


class SurfaceLaplacianError(Exception):
    """Базовое исключение пакета."""


class VariableSetMismatchError(SurfaceLaplacianError, ValueError):
    """Операнды построены над разными наборами переменных (разный род поверхности)."""


class ExponentOverflowError(SurfaceLaplacianError, OverflowError):
    """Показатель монома вышел за допустимую границу."""


class PolynomialParseError(SurfaceLaplacianError, ValueError):
    """Ошибка разбора текстовой записи многочлена."""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text  # Исходная строка
        self.offset = offset  # Позиция, на которой разбор остановился
        super().__init__(f"{message} at offset {offset} in {text!r}")


class GraphError(SurfaceLaplacianError, ValueError):
    """Некорректная операция над графом (неизвестные id, стягивание петли и т.п.)."""


class MovePreconditionError(GraphError):
    """Не выполнено условие применимости хода Рейдемейстера на графе."""


class SizeGuardError(SurfaceLaplacianError):
    """Граф слишком велик для полного перебора подмножеств рёбер."""


class DiagramError(SurfaceLaplacianError, ValueError):
    """Некорректная диаграмма зацепления."""


class ColorabilityError(DiagramError):
    """Диаграмма не допускает шахматной раскраски."""

    def __init__(self, message: str, odd_cycle: Sequence[str] = ()):
        self.odd_cycle = tuple(odd_cycle)  # Нечётный цикл областей - свидетель
        super().__init__(message)


class InputFormatError(SurfaceLaplacianError, ValueError):
    """Ошибка формата входного файла."""

    def __init__(self, message: str, source: Optional[str] = None):
        self.source = source  # Имя файла (если известно)
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{message}")

    @classmethod
    def from_validation(cls, exc: ValidationError, source: Optional[str] = None) -> "InputFormatError":
        """Собирает сообщение из ошибок pydantic: путь к полю и текст ошибки."""
        details = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or '<root>'}: {error['msg']}" for error in exc.errors()
        )
        return cls(details, source)

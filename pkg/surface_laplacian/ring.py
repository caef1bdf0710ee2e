"""Exact arithmetic in the Laurent polynomial ring Z[x1^±1, y1^±1, ..., xg^±1, yg^±1]."""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Union

from surface_laplacian.config import settings
from surface_laplacian.errors import (
    ExponentOverflowError,
    PolynomialParseError,
    VariableSetMismatchError,
)

logger = logging.getLogger(__name__)

# Короткие имена переменных для рода 1 и 2 (как в примерах с тором и поверхностью рода 2)
SHORT_NAMES = {
    1: ("x", "y"),
    2: ("x", "y", "u", "v"),
}

Exponents = tuple[int, ...]


def _check_exponents(exponents: Iterable[int]) -> Exponents:
    """Приводит показатели к кортежу int и проверяет границу settings.exponent_limit."""
    result = tuple(int(e) for e in exponents)
    limit = settings.exponent_limit
    for e in result:
        if abs(e) > limit:
            raise ExponentOverflowError(f"exponent {e} exceeds the limit {limit}")
    return result


@dataclass(frozen=True)
class VariableSet:
    """Упорядоченный набор переменных x1, y1, ..., xg, yg для поверхности рода g."""

    genus: int  # Род поверхности g

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError(f"genus must be non-negative, got {self.genus}")

    @property
    def size(self) -> int:
        """Число переменных (2g)."""
        return 2 * self.genus

    @cached_property
    def names(self) -> tuple[str, ...]:
        """Канонические имена переменных в фиксированном порядке."""
        if self.genus in SHORT_NAMES:
            return SHORT_NAMES[self.genus]
        return tuple(f"{letter}{i}" for i in range(1, self.genus + 1) for letter in ("x", "y"))

    @cached_property
    def index(self) -> Mapping[str, int]:
        """Имя переменной -> позиция; принимает и x1/y1, и короткие псевдонимы."""
        lookup: dict[str, int] = {}
        for i in range(1, self.genus + 1):
            lookup[f"x{i}"] = 2 * (i - 1)
            lookup[f"y{i}"] = 2 * (i - 1) + 1
        for position, name in enumerate(SHORT_NAMES.get(self.genus, ())):
            lookup[name] = position
        return MappingProxyType(lookup)

    def require_same(self, other: "VariableSet") -> None:
        """Проверяет, что оба значения построены над одним набором переменных."""
        if self.genus != other.genus:
            raise VariableSetMismatchError(f"variable sets differ: genus {self.genus} vs genus {other.genus}")


@dataclass(frozen=True, order=True)
class Monomial:
    """Элемент группы накрывающих преобразований: вектор показателей длины 2g."""

    exponents: Exponents  # Числа пересечений с базисными кривыми

    def __post_init__(self):
        object.__setattr__(self, "exponents", _check_exponents(self.exponents))

    @classmethod
    def identity(cls, variables: VariableSet) -> "Monomial":
        return cls((0,) * variables.size)

    @classmethod
    def generator(cls, variables: VariableSet, name: str, power: int = 1) -> "Monomial":
        """Моном name^power."""
        if name not in variables.index:
            raise VariableSetMismatchError(f"unknown variable {name!r} for genus {variables.genus}")
        exponents = [0] * variables.size
        exponents[variables.index[name]] = power
        return cls(tuple(exponents))

    def __len__(self) -> int:
        return len(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if len(self) != len(other):
            raise VariableSetMismatchError(f"monomials of different length: {len(self)} vs {len(other)}")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def inverse(self) -> "Monomial":
        return Monomial(tuple(-e for e in self.exponents))

    @property
    def is_identity(self) -> bool:
        return not any(self.exponents)

    def to_string(self, variables: VariableSet) -> str:
        """Каноническая запись монома, например "x^1 y^-1"; единица записывается как "1"."""
        text = _monomial_body(self.exponents, variables)
        return text or "1"


def term_order_key(exponents: Exponents) -> tuple:
    """
    Ключ канонического порядка членов.

    Сначала суммарная степень (сумма модулей показателей), затем покоординатно в порядке
    переменных: ненулевой показатель раньше нулевого, положительный раньше отрицательного,
    меньший по модулю раньше большего.
    """
    return (
        sum(abs(e) for e in exponents),
        tuple((e == 0, e < 0, abs(e)) for e in exponents),
    )


def _monomial_body(exponents: Exponents, variables: VariableSet) -> str:
    return " ".join(f"{name}^{e}" for name, e in zip(variables.names, exponents) if e)


class LaurentPoly:
    """
    Неизменяемый многочлен Лорана с целыми коэффициентами.

    Хранит отображение вектор показателей -> ненулевой коэффициент.
    Пустое отображение - нулевой многочлен.
    """

    __slots__ = ("_variables", "_terms")

    def __init__(
        self,
        variables: VariableSet,
        terms: Union[Mapping[Exponents, int], Mapping[Monomial, int], None] = None,
    ):
        pruned: dict[Exponents, int] = {}
        for key, coeff in (terms or {}).items():
            exponents = key.exponents if isinstance(key, Monomial) else _check_exponents(key)
            if len(exponents) != variables.size:
                raise VariableSetMismatchError(
                    f"term of length {len(exponents)} does not fit genus {variables.genus}"
                )
            total = pruned.get(exponents, 0) + int(coeff)
            if total:
                pruned[exponents] = total
            else:
                pruned.pop(exponents, None)
        self._variables = variables
        self._terms = MappingProxyType(pruned)

    # Конструкторы

    @classmethod
    def zero(cls, variables: VariableSet) -> "LaurentPoly":
        return cls(variables)

    @classmethod
    def constant(cls, variables: VariableSet, value: int) -> "LaurentPoly":
        return cls(variables, {(0,) * variables.size: value})

    @classmethod
    def from_monomial(cls, variables: VariableSet, monomial: Monomial, coeff: int = 1) -> "LaurentPoly":
        return cls(variables, {monomial.exponents: coeff})

    # Доступ к данным

    @property
    def variables(self) -> VariableSet:
        return self._variables

    @property
    def terms(self) -> Mapping[Exponents, int]:
        return self._terms

    def sorted_terms(self) -> list[tuple[Exponents, int]]:
        """Члены в каноническом порядке."""
        return sorted(self._terms.items(), key=lambda item: term_order_key(item[0]))

    def monomials(self) -> Iterator[Monomial]:
        for exponents, _ in self.sorted_terms():
            yield Monomial(exponents)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # Арифметика

    def _coerce(self, other: Union["LaurentPoly", int]) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._variables.require_same(other._variables)
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(self._variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        merged = dict(self._terms)
        for exponents, coeff in other._terms.items():
            merged[exponents] = merged.get(exponents, 0) + coeff
        return LaurentPoly(self._variables, merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self._variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        product: dict[Exponents, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = _check_exponents(a + b for a, b in zip(e1, e2))
                product[key] = product.get(key, 0) + c1 * c2
        return LaurentPoly(self._variables, product)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(self._variables, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._variables.genus == other._variables.genus and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        # Константа хешируется как int: p == 5 влечёт hash(p) == hash(5)
        if all(not any(exponents) for exponents in self._terms):
            return hash(sum(self._terms.values()))
        return hash((self._variables.genus, frozenset(self._terms.items())))

    def __str__(self) -> str:
        return canonical_string(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({canonical_string(self)!r}, genus={self._variables.genus})"


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Сумма многочленов над одним набором переменных."""
    return p + q


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Произведение многочленов над одним набором переменных."""
    return p * q


def bar(p: LaurentPoly) -> LaurentPoly:
    """Инволюция: каждый моном заменяется обратным, коэффициенты не меняются."""
    return LaurentPoly(p.variables, {tuple(-e for e in exps): c for exps, c in p.terms.items()})


def augment(p: LaurentPoly) -> int:
    """Аугментация: значение многочлена при всех переменных, равных 1."""
    return sum(p.terms.values())


def sign_normalized(p: LaurentPoly) -> LaurentPoly:
    """Умножает многочлен на -1, если его первый канонический член отрицателен."""
    terms = p.sorted_terms()
    if terms and terms[0][1] < 0:
        return -p
    return p


def substitute_monomial(
    monomial: Monomial,
    images: Mapping[Union[str, int], Monomial],
    variables: VariableSet,
    target: Optional[VariableSet] = None,
) -> Monomial:
    """Образ монома при подстановке переменная -> моном; длина образа задаётся target (по умолчанию variables)."""
    length = (target or variables).size
    resolved = _resolve_images(images, variables)
    exponents = [0] * length
    for e, image in zip(monomial.exponents, resolved):
        if len(image) != length:
            raise VariableSetMismatchError(f"image monomial does not fit genus {(target or variables).genus}")
        for k, value in enumerate(image.exponents):
            exponents[k] += e * value
    return Monomial(tuple(exponents))


def _resolve_images(images: Mapping[Union[str, int], Monomial], variables: VariableSet) -> list[Monomial]:
    resolved: list[Optional[Monomial]] = [None] * variables.size
    for key, image in images.items():
        if isinstance(key, str):
            if key not in variables.index:
                raise VariableSetMismatchError(f"unknown variable {key!r}")
            position = variables.index[key]
        else:
            position = int(key)
            if not 0 <= position < variables.size:
                raise VariableSetMismatchError(f"variable position {position} out of range for genus {variables.genus}")
        resolved[position] = image
    missing = [variables.names[i] for i, image in enumerate(resolved) if image is None]
    if missing:
        raise VariableSetMismatchError(f"substitution does not assign: {', '.join(missing)}")
    return resolved  # type: ignore[return-value]


def substitute(
    p: LaurentPoly,
    images: Mapping[Union[str, int], Monomial],
    target: Optional[VariableSet] = None,
) -> LaurentPoly:
    """
    Гомоморфизм колец, заданный образами переменных.

    Args:
        p: Исходный многочлен
        images: Переменная (имя или позиция) -> моном; должны быть заданы все 2g переменных
        target: Набор переменных образа (по умолчанию тот же, что у p)

    Returns:
        Многочлен, в котором каждый моном заменён произведением образов переменных
    """
    target = target or p.variables
    result: dict[Exponents, int] = {}
    for exponents, coeff in p.terms.items():
        image = substitute_monomial(Monomial(exponents), images, p.variables, target)
        result[image.exponents] = result.get(image.exponents, 0) + coeff
    return LaurentPoly(target, result)


def canonical_string(p: LaurentPoly) -> str:
    """
    Детерминированная запись многочлена.

    Члены идут в каноническом порядке (term_order_key), знаки явные, показатели в виде ^k:
    "6 - x^1 - x^-1 - y^1 - y^-1 - x^1 y^-1 - x^-1 y^1". Нулевой многочлен - "0".
    """
    if not p:
        return "0"
    parts = []
    for position, (exponents, coeff) in enumerate(p.sorted_terms()):
        body = _monomial_body(exponents, p.variables)
        magnitude = abs(coeff)
        if not body:
            text = str(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{magnitude} {body}"
        if position == 0:
            parts.append(text if coeff > 0 else f"- {text}")
        else:
            parts.append(f"+ {text}" if coeff > 0 else f"- {text}")
    return " ".join(parts)


# Разбор текстовой записи

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[A-Za-z]\d*)|(?P<op>[-+^*]))")


class _PolyParser:
    """Рекурсивный спуск по грамматике term ((+|-) term)*, term = [int] (var^int)*."""

    def __init__(self, text: str, variables: VariableSet):
        self.text = text
        self.variables = variables
        self.tokens: list[tuple[str, str, int]] = []
        position = 0
        stripped = text.rstrip()
        while position < len(stripped):
            match = _TOKEN.match(stripped, position)
            if not match:
                raise PolynomialParseError("unexpected character", text, position)
            kind = match.lastgroup
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            position = match.end()
        self.cursor = 0

    def _peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.cursor] if self.cursor < len(self.tokens) else None

    def _take(self) -> tuple[str, str, int]:
        token = self._peek()
        if token is None:
            raise PolynomialParseError("unexpected end of input", self.text, len(self.text))
        self.cursor += 1
        return token

    def _offset(self) -> int:
        token = self._peek()
        return token[2] if token else len(self.text)

    def parse(self) -> LaurentPoly:
        if not self.tokens:
            raise PolynomialParseError("empty polynomial", self.text, 0)
        terms: dict[Exponents, int] = {}
        sign = 1
        token = self._peek()
        if token and token[0] == "op" and token[1] in "+-":
            sign = -1 if token[1] == "-" else 1
            self._take()
        while True:
            exponents, coeff = self._term()
            terms[exponents] = terms.get(exponents, 0) + sign * coeff
            token = self._peek()
            if token is None:
                break
            if token[0] != "op" or token[1] not in "+-":
                raise PolynomialParseError("expected '+' or '-'", self.text, token[2])
            sign = -1 if token[1] == "-" else 1
            self._take()
        return LaurentPoly(self.variables, terms)

    def _term(self) -> tuple[Exponents, int]:
        coeff = 1
        seen = False
        exponents = [0] * self.variables.size
        token = self._peek()
        if token and token[0] == "int":
            coeff = int(self._take()[1])
            seen = True
        while True:
            token = self._peek()
            if token and token[0] == "op" and token[1] == "*" and seen:
                self._take()
                token = self._peek()
                if token is None or token[0] != "var":
                    raise PolynomialParseError("expected a variable after '*'", self.text, self._offset())
            if token is None or token[0] != "var":
                break
            _, name, offset = self._take()
            if name not in self.variables.index:
                raise PolynomialParseError(f"unknown variable {name!r}", self.text, offset)
            power = 1
            token = self._peek()
            if token and token[0] == "op" and token[1] == "^":
                self._take()
                power_sign = 1
                token = self._peek()
                if token and token[0] == "op" and token[1] in "+-":
                    power_sign = -1 if self._take()[1] == "-" else 1
                kind, value, offset = self._take()
                if kind != "int":
                    raise PolynomialParseError("expected an integer exponent", self.text, offset)
                power = power_sign * int(value)
            exponents[self.variables.index[name]] += power
            seen = True
        if not seen:
            raise PolynomialParseError("expected a term", self.text, self._offset())
        return _check_exponents(exponents), coeff


def parse_poly(text: str, variables: VariableSet) -> LaurentPoly:
    """
    Разбирает текстовую запись многочлена.

    Args:
        text: Запись вида "6 - x^1 - x^-1" (допускаются имена x1, y1, ... и псевдонимы x, y, u, v при g <= 2)
        variables: Набор переменных

    Returns:
        LaurentPoly

    Raises:
        PolynomialParseError: Если запись не соответствует грамматике
    """
    return _PolyParser(text, variables).parse()


def parse_monomial(text: str, variables: VariableSet) -> Monomial:
    """Разбирает запись монома связности ("x^1 y^-1", "1")."""
    poly = parse_poly(text, variables)
    if len(poly) != 1 or next(iter(poly.terms.values())) != 1:
        raise PolynomialParseError("expected a single monomial with coefficient 1", text, 0)
    return Monomial(next(iter(poly.terms)))


def parse_substitution(text: str, variables: VariableSet) -> dict[str, Monomial]:
    """Разбирает подстановку вида "x=y^-1, y=x^1 y^-1"."""
    images: dict[str, Monomial] = {}
    for chunk in filter(None, (part.strip() for part in text.split(","))):
        name, sep, image = chunk.partition("=")
        name = name.strip()
        if not sep or name not in variables.index:
            raise PolynomialParseError(f"bad substitution entry {chunk!r}", text, text.find(chunk))
        images[variables.names[variables.index[name]]] = parse_monomial(image.strip(), variables)
    return images

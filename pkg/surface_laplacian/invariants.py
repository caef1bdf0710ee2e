"""Module invariants of L_G, the dual-pair invariant, symplectic rank and virtual-genus certificates."""

import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import sympy

from surface_laplacian.errors import VariableSetMismatchError
from surface_laplacian.graph import SignedGraph
from surface_laplacian.laplacian import LaplacianMatrix, determinant, laplacian_matrix
from surface_laplacian.ring import LaurentPoly, Monomial, augment, sign_normalized

logger = logging.getLogger(__name__)

IntMatrix = list[list[int]]


@dataclass(frozen=True)
class AbelianInvariants:
    """Конечно порождённая абелева группа Z^free_rank + Z/d1 + Z/d2 + ..., d1 | d2 | ..."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.free_rank < 0:
            raise ValueError(f"free rank must be non-negative, got {self.free_rank}")
        if any(d <= 1 for d in self.torsion):
            raise ValueError(f"torsion coefficients must exceed 1, got {list(self.torsion)}")
        for smaller, larger in zip(self.torsion, self.torsion[1:]):
            if larger % smaller:
                raise ValueError(f"torsion coefficients must form a divisibility chain, got {list(self.torsion)}")

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) or "0"


def integer_specialization(matrix: LaplacianMatrix) -> IntMatrix:
    """Аугментация каждого элемента: все переменные равны 1."""
    return [[augment(entry) for entry in row] for row in matrix.entries]


def _smallest_entry(a: IntMatrix, start: int) -> Optional[tuple[int, int]]:
    best = None
    for i in range(start, len(a)):
        for j in range(start, len(a[i])):
            if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                best = (i, j)
    return best


def _move_to(a: IntMatrix, t: int, i: int, j: int) -> None:
    a[t], a[i] = a[i], a[t]
    for row in a:
        row[t], row[j] = row[j], row[t]


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> AbelianInvariants:
    """
    Инвариантные множители коядра целочисленной матрицы M: Z^cols -> Z^rows.

    Точная целочисленная арифметика, ведущий элемент - наименьший по модулю ненулевой
    элемент оставшейся подматрицы.

    Args:
        matrix: Матрица rows x cols (список строк)

    Returns:
        AbelianInvariants с free_rank = rows - rank(M)
    """
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diagonal: list[int] = []
    t = 0
    while t < min(rows, cols):
        position = _smallest_entry(a, t)
        if position is None:
            break
        _move_to(a, t, *position)
        while True:
            pivot = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // pivot
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, cols):
                q = a[t][j] // pivot
                if q:
                    for row in a:
                        row[j] -= q * row[t]
            leftovers = [(i, t) for i in range(t + 1, rows) if a[i][t]] + [
                (t, j) for j in range(t + 1, cols) if a[t][j]
            ]
            if leftovers:
                # Остатки меньше ведущего элемента: берём наименьший из них
                i, j = min(leftovers, key=lambda ij: abs(a[ij[0]][ij[1]]))
                _move_to(a, t, i, j)
                continue
            stray = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % pivot),
                None,
            )
            if stray is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[stray])]
        logger.debug(f"SNF pivot {a[t][t]} at step {t}")
        diagonal.append(abs(a[t][t]))
        t += 1
    return AbelianInvariants(rows - len(diagonal), tuple(d for d in diagonal if d > 1))


def module_invariants(graph: SignedGraph) -> AbelianInvariants:
    """Z ⊗ ℒ_G: нормальная форма Смита целочисленной специализации L_G."""
    return smith_normal_form(integer_specialization(laplacian_matrix(graph)))


def presentation_export(matrix: LaplacianMatrix) -> str:
    """Матрица представления ℒ_G: JSON с каноническими строками элементов по строкам."""
    payload = {
        "genus": matrix.variables.genus,
        "vertices": list(matrix.vertices),
        "entries": matrix.rows(),
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# Симплектический ранг и сертификаты рода


@dataclass(frozen=True)
class SymplecticRank:
    """Ранг подмодуля H_1(S; R), порождённого мономами многочлена, и базис из этих мономов."""

    rank: int
    witness: tuple[Monomial, ...] = ()


def symplectic_rank(p: LaurentPoly) -> SymplecticRank:
    """
    rk_s(p): ранг над Q векторов показателей мономов с ненулевым коэффициентом.

    Свидетель набирается жадно в каноническом порядке членов; нулевой вектор не учитывается.
    """
    witness: list[Monomial] = []
    rows: list[tuple[int, ...]] = []
    for monomial in p.monomials():
        if monomial.is_identity:
            continue
        if sympy.Matrix(rows + [monomial.exponents]).rank() > len(rows):
            rows.append(monomial.exponents)
            witness.append(monomial)
            if len(rows) == p.variables.size:
                break
    return SymplecticRank(len(rows), tuple(witness))


@dataclass(frozen=True)
class GenusCertificate:
    """Итог проверки vg(ℓ) = g по симплектическим рангам Δ_G и Δ_{G*}."""

    rank_g: int                                  # rk_s(Δ_G)
    two_g: int                                   # 2g
    rank_gstar: Optional[int] = None             # rk_s(Δ_{G*}), если дуальный граф задан
    witness: tuple[Monomial, ...] = ()            # Мономы, реализующие ранг 2g (или ранг Δ_G)

    @property
    def conclusive(self) -> bool:
        return self.rank_g == self.two_g or self.rank_gstar == self.two_g

    @property
    def virtual_genus(self) -> Optional[int]:
        """Сертифицированный виртуальный род или None."""
        return self.two_g // 2 if self.conclusive else None

    @property
    def verdict(self) -> str:
        return f"vg = {self.virtual_genus} (certified)" if self.conclusive else "inconclusive"


def genus_certificate(delta_g: LaurentPoly, delta_gstar: Optional[LaurentPoly], genus: int) -> GenusCertificate:
    """
    Сертификат виртуального рода.

    Если rk_s(Δ_G) или rk_s(Δ_{G*}) равен 2g, то vg(ℓ) = g; иначе результат не даёт информации.

    Args:
        delta_g: Δ_G над переменными рода genus
        delta_gstar: Δ_{G*} или None
        genus: Род поверхности g
    """
    if delta_g.variables.genus != genus:
        raise VariableSetMismatchError(f"polynomial is over genus {delta_g.variables.genus}, expected {genus}")
    if delta_gstar is not None:
        delta_g.variables.require_same(delta_gstar.variables)

    primal = symplectic_rank(delta_g)
    dual = symplectic_rank(delta_gstar) if delta_gstar is not None else None
    witness = primal.witness
    if primal.rank != 2 * genus and dual is not None and dual.rank == 2 * genus:
        witness = dual.witness
    return GenusCertificate(
        rank_g=primal.rank,
        two_g=2 * genus,
        rank_gstar=dual.rank if dual is not None else None,
        witness=witness,
    )


# Инварианты пары (G, G*)


def pair_invariant(graph: SignedGraph, dual: SignedGraph) -> tuple[LaurentPoly, LaurentPoly]:
    """
    Неупорядоченная пара {Δ_G, Δ_{G*}}.

    Каждый многочлен нормирован по знаку (первый канонический член положителен),
    пара упорядочена по каноническим строкам.
    """
    graph.variables.require_same(dual.variables)
    pair = [sign_normalized(determinant(laplacian_matrix(g))) for g in (graph, dual)]
    first, second = sorted(pair, key=str)
    return first, second


def pair_module_invariant(graph: SignedGraph, dual: SignedGraph) -> tuple[AbelianInvariants, AbelianInvariants]:
    """Неупорядоченная пара {Z ⊗ ℒ_G, Z ⊗ ℒ_{G*}} в каноническом порядке."""
    graph.variables.require_same(dual.variables)
    first, second = sorted((module_invariants(graph), module_invariants(dual)), key=str)
    return first, second

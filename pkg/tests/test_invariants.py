import itertools
import json
import math
import random

import pytest

from surface_laplacian.cli import random_graph
from surface_laplacian.diagram import dual_signs
from surface_laplacian.errors import VariableSetMismatchError
from surface_laplacian.graph import Edge, SignedGraph
from surface_laplacian.invariants import (
    AbelianInvariants,
    genus_certificate,
    integer_specialization,
    module_invariants,
    pair_invariant,
    pair_module_invariant,
    presentation_export,
    smith_normal_form,
    symplectic_rank,
)
from surface_laplacian.laplacian import delta, laplacian_matrix
from surface_laplacian.ring import LaurentPoly, Monomial, VariableSet, bar, parse_poly
from tests.conftest import THETA_DELTA


@pytest.mark.parametrize(
    "matrix, expected",
    [
        ([[3, -3], [-3, 3]], "Z + Z/3"),
        ([[0]], "Z"),
        ([[1, 0], [0, 1]], "0"),
        ([[2, 0], [0, 3]], "Z/6"),
        ([[2, 0], [0, 4]], "Z/2 + Z/4"),
        ([[0, 0], [0, 0]], "Z^2"),
        ([[6, 4]], "Z/2"),
        ([[-5]], "Z/5"),
    ],
)
def test_smith_normal_form_examples(matrix, expected):
    assert str(smith_normal_form(matrix)) == expected


def test_abelian_invariants_validation():
    with pytest.raises(ValueError):
        AbelianInvariants(-1)
    with pytest.raises(ValueError):
        AbelianInvariants(0, (1,))
    with pytest.raises(ValueError, match="divisibility chain"):
        AbelianInvariants(0, (2, 3))
    assert str(AbelianInvariants(2, (3, 6))) == "Z^2 + Z/3 + Z/6"


def _hom_count(matrix: list[list[int]], d: int) -> int:
    """Число гомоморфизмов коядра матрицы в Z/d: решения y·M ≡ 0 (mod d)."""
    rows, cols = len(matrix), len(matrix[0])
    count = 0
    for y in itertools.product(range(d), repeat=rows):
        if all(sum(y[i] * matrix[i][j] for i in range(rows)) % d == 0 for j in range(cols)):
            count += 1
    return count


@pytest.mark.parametrize("seed", range(60))
def test_smith_normal_form_counts_homomorphisms(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 3), rng.randint(1, 3)
    matrix = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
    invariants = smith_normal_form(matrix)
    for d in range(2, 7):
        expected = d**invariants.free_rank * math.prod(math.gcd(t, d) for t in invariants.torsion)
        assert _hom_count(matrix, d) == expected


def test_theta_module(theta):
    assert integer_specialization(laplacian_matrix(theta)) == [[3, -3], [-3, 3]]
    assert module_invariants(theta) == AbelianInvariants(1, (3,))


def test_planar_triangle_module():
    planar = VariableSet(0)
    one = Monomial.identity(planar)
    edges = tuple(Edge(f"e{i}", a, b, 1, one) for i, (a, b) in enumerate([("a", "b"), ("b", "c"), ("c", "a")], 1))
    assert str(module_invariants(SignedGraph(planar, ("a", "b", "c"), edges))) == "Z + Z/3"


@pytest.mark.parametrize("seed", range(30))
def test_module_always_has_free_part(seed):
    graph = random_graph(seed, 1 + seed % 4, seed % 7, seed % 3, 2)
    assert module_invariants(graph).free_rank >= 1


def test_presentation_export(theta):
    text = presentation_export(laplacian_matrix(theta))
    assert text.endswith("\n")
    payload = json.loads(text)
    assert payload == {
        "genus": 1,
        "vertices": ["v1", "v2"],
        "entries": [["3", "- 1 - x^1 - y^1"], ["- 1 - x^-1 - y^-1", "3"]],
    }


def test_symplectic_rank_of_theta(torus):
    found = symplectic_rank(parse_poly(THETA_DELTA, torus))
    assert found.rank == 2
    assert found.witness == (Monomial((1, 0)), Monomial((0, 1)))


def test_symplectic_rank_edge_cases(torus, load_graph):
    assert symplectic_rank(LaurentPoly.zero(torus)).rank == 0
    assert symplectic_rank(LaurentPoly.constant(torus, 5)).rank == 0
    assert symplectic_rank(parse_poly("2 - x^2 - x^-2", torus)).rank == 1
    assert symplectic_rank(delta(load_graph("satellite"))).rank == 2


@pytest.mark.parametrize("text", [THETA_DELTA, "1 + x y^2 - 3x^-1", "x^2 y^2 + x y"])
def test_symplectic_rank_ignores_bar_and_sign(torus, text):
    p = parse_poly(text, torus)
    assert symplectic_rank(bar(p)).rank == symplectic_rank(p).rank
    assert symplectic_rank(-p).rank == symplectic_rank(p).rank


def test_certificate_from_primal(theta):
    certificate = genus_certificate(delta(theta), None, 1)
    assert certificate.conclusive
    assert certificate.virtual_genus == 1
    assert certificate.verdict == "vg = 1 (certified)"
    assert certificate.rank_gstar is None


def test_certificate_from_dual(torus, load_graph):
    loop = SignedGraph(torus, ("v",), (Edge("e", "v", "v", 1, Monomial((1, 0))),))
    alone = genus_certificate(delta(loop), None, 1)
    assert alone.rank_g == 1
    assert alone.verdict == "inconclusive"
    assert alone.virtual_genus is None

    helped = genus_certificate(delta(loop), delta(load_graph("theta_dual")), 1)
    assert helped.rank_gstar == 2
    assert helped.verdict == "vg = 1 (certified)"
    assert helped.witness == (Monomial((1, 0)), Monomial((0, 1)))


def test_certificate_for_genus_two(load_graph):
    certificate = genus_certificate(delta(load_graph("genus2")), delta(load_graph("genus2_dual")), 2)
    assert certificate.rank_g == 4
    assert certificate.two_g == 4
    assert certificate.virtual_genus == 2


def test_zero_polynomial_is_inconclusive(load_graph):
    value = delta(load_graph("challenge"))
    assert value == 0
    assert genus_certificate(value, None, 1).verdict == "inconclusive"


def test_certificate_genus_mismatch(theta):
    with pytest.raises(VariableSetMismatchError):
        genus_certificate(delta(theta), None, 2)


def test_pair_invariant_of_theta(theta, load_graph):
    dual = load_graph("theta_dual")
    first, second = pair_invariant(theta, dual)
    assert str(first) == str(second) == THETA_DELTA
    signed = dual_signs(theta, dual)
    assert delta(signed) == -delta(theta)
    assert pair_invariant(theta, signed) == (first, second)


def test_pair_invariant_is_unordered(load_graph):
    primal, dual = load_graph("genus2"), load_graph("genus2_dual")
    pair = pair_invariant(primal, dual)
    assert pair == pair_invariant(dual, primal)
    assert pair[0] != pair[1]
    assert str(pair[1]) == "8 - x^1 - x^-1 - y^1 - y^-1 - u^1 - u^-1 - v^1 - v^-1"


def test_pair_module_invariant(theta, load_graph):
    first, second = pair_module_invariant(theta, load_graph("theta_dual"))
    assert (str(first), str(second)) == ("Z", "Z + Z/3")


def test_pair_requires_same_genus(theta, load_graph):
    with pytest.raises(VariableSetMismatchError):
        pair_invariant(theta, load_graph("genus2"))

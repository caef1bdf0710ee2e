"""Command-line front end: graph and diagram files in, canonical polynomials and reports out."""

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

from surface_laplacian import samples
from surface_laplacian.config import settings
from surface_laplacian.diagram import (
    check_checkerboard,
    diagram_from_json,
    dual_signs,
    family_diagram,
    family_dual_skeleton,
    medial_graph,
)
from surface_laplacian.errors import ColorabilityError, MovePreconditionError, SurfaceLaplacianError
from surface_laplacian.graph import (
    Edge,
    MoveDirection,
    SignedGraph,
    disjoint_union,
    graph_from_json,
    graph_json,
    graph_to_file,
    rg1,
    rg2,
    rg3,
)
from surface_laplacian.invariants import genus_certificate, integer_specialization, module_invariants, presentation_export
from surface_laplacian.laplacian import METHODS, delta, laplacian_matrix
from surface_laplacian.models import RunReport
from surface_laplacian.ring import (
    LaurentPoly,
    Monomial,
    VariableSet,
    augment,
    bar,
    parse_monomial,
    parse_poly,
    parse_substitution,
    sign_normalized,
    substitute,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2


class InputSet:
    """Прочитанные входные файлы; хэш считается по всем байтам в порядке аргументов."""

    def __init__(self):
        self._digest = hashlib.sha256()

    def read(self, name: str) -> bytes:
        """Читает файл, а если его нет - встроенный пример с таким именем."""
        path = Path(name)
        data = path.read_bytes() if path.is_file() else samples.read_sample(name)
        self._digest.update(data)
        return data

    def graph(self, name: str) -> SignedGraph:
        return graph_from_json(self.read(name), source=name)

    @property
    def digest(self) -> str:
        return self._digest.hexdigest()


def random_graph(seed: int, n: int, m: int, g: int, max_exponent: int = 2) -> SignedGraph:
    """
    Детерминированный псевдослучайный граф для проверок свойств.

    Концы рёбер выбираются равномерно (петли допускаются), знаки равновероятны,
    показатели связностей равномерны в [-max_exponent, max_exponent].
    """
    if n < 1 or m < 0:
        raise ValueError(f"random_graph needs n >= 1 and m >= 0, got n={n}, m={m}")
    rng = random.Random(seed)
    variables = VariableSet(g)
    vertices = tuple(f"v{i}" for i in range(1, n + 1))
    edges = []
    for i in range(1, m + 1):
        tail, head = rng.choice(vertices), rng.choice(vertices)
        sign = rng.choice((1, -1))
        exponents = tuple(rng.randint(-max_exponent, max_exponent) for _ in range(variables.size))
        edges.append(Edge(f"e{i}", tail, head, sign, Monomial(exponents)))
    return SignedGraph(variables, vertices, tuple(edges))


# Команды


def cmd_poly(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """Δ_G выбранным методом; с --method all проверяется совпадение трёх методов."""
    graph = inputs.graph(args.graph)
    methods = METHODS if args.method == "all" else (args.method,)
    values = {method: delta(graph, method) for method in methods}
    results: dict = {"delta": {method: str(value) for method, value in values.items()}}
    if args.substitute:
        images = parse_substitution(args.substitute, graph.variables)
        results["substituted"] = {method: str(substitute(value, images)) for method, value in values.items()}

    status = "OK"
    if args.method == "all":
        status = "PASS" if len(set(values.values())) == 1 else "FAIL"
        if status == "FAIL":
            logger.warning(f"methods disagree on {args.graph}: {results['delta']}")
    return RunReport(command=f"poly --method {args.method}", input_digest=inputs.digest, status=status, results=results)


def cmd_module(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """Матрица представления и Z ⊗ ℒ_G."""
    graph = inputs.graph(args.graph)
    matrix = laplacian_matrix(graph)
    invariants = module_invariants(graph)
    results = {
        "presentation": matrix.rows(),
        "integer_matrix": integer_specialization(matrix),
        "module": str(invariants),
        "free_rank": invariants.free_rank,
        "torsion": list(invariants.torsion),
    }
    if args.output:
        Path(args.output).write_text(presentation_export(matrix), encoding="utf-8")
        logger.info(f"presentation matrix written to {args.output}")
        results["output"] = args.output
    return RunReport(command="module", input_digest=inputs.digest, results=results)


def cmd_genus(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """Симплектические ранги и сертификат виртуального рода."""
    graph = inputs.graph(args.graph)
    dual = inputs.graph(args.dual) if args.dual else None
    delta_g = delta(graph)
    delta_gstar = delta(dual) if dual is not None else None
    certificate = genus_certificate(delta_g, delta_gstar, graph.variables.genus)
    results = {
        "delta_g": str(delta_g),
        "rank_g": certificate.rank_g,
        "two_g": certificate.two_g,
        "witness": [m.to_string(graph.variables) for m in certificate.witness],
        "verdict": certificate.verdict,
    }
    if delta_gstar is not None:
        results["delta_gstar"] = str(delta_gstar)
        results["rank_gstar"] = certificate.rank_gstar
    command = "genus --dual" if dual is not None else "genus"
    return RunReport(command=command, input_digest=inputs.digest, results=results)


def _apply_move(graph: SignedGraph, args: argparse.Namespace) -> SignedGraph:
    sign = args.sign
    connection = parse_monomial(args.connection, graph.variables)
    edge_ids = args.edge_ids.split(",") if args.edge_ids else None
    if args.move == "rg1":
        if not args.vertex:
            raise MovePreconditionError("rg1: --vertex is required")
        direction = MoveDirection(args.direction or "remove")
        edge_id = edge_ids[0] if edge_ids else None
        return rg1(graph, args.vertex, direction, anchor=args.anchor, sign=sign, connection=connection, edge_id=edge_id)
    if args.move == "rg2":
        if not args.first:
            raise MovePreconditionError("rg2: --first is required")
        direction = MoveDirection(args.direction or "add")
        return rg2(graph, args.first, args.second or args.first, sign, connection, direction, edge_ids=edge_ids)
    if not args.vertex:
        raise MovePreconditionError("rg3: --vertex is required")
    return rg3(graph, args.vertex, edge_ids=edge_ids)


def cmd_moves(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """Применяет ход к графу и проверяет сохранение Δ (с точностью до знака) и модуля."""
    graph = inputs.graph(args.graph)
    moved = _apply_move(graph, args)
    before, after = delta(graph), delta(moved)
    module_before, module_after = module_invariants(graph), module_invariants(moved)
    results: dict = {
        "move": args.move,
        "delta_before": str(before),
        "delta_after": str(after),
        "module_before": str(module_before),
        "module_after": str(module_after),
    }
    passed = sign_normalized(before) == sign_normalized(after) and module_before == module_after
    if args.move == "rg2":
        unchanged = laplacian_matrix(graph).entries == laplacian_matrix(moved).entries
        results["laplacian_unchanged"] = unchanged
        passed = passed and unchanged

    if args.output:
        Path(args.output).write_text(graph_json(moved), encoding="utf-8")
        logger.info(f"transformed graph written to {args.output}")
        results["output"] = args.output
    else:
        results["graph"] = graph_to_file(moved).model_dump()
    return RunReport(
        command=f"moves --move {args.move}",
        input_digest=inputs.digest,
        status="PASS" if passed else "FAIL",
        results=results,
    )


def cmd_diagram(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """check: шахматная раскрашиваемость; medial: медиальный граф."""
    diagram = diagram_from_json(inputs.read(args.diagram), source=args.diagram)
    results: dict
    if args.action == "check":
        report = check_checkerboard([r.id for r in diagram.regions], diagram.arcs)
        results = {"colorable": report.colorable}
        if report.colorable:
            results["shadings"] = [sorted(shading) for shading in report.shadings]
        else:
            results["odd_cycle"] = list(report.odd_cycle)
        return RunReport(command="diagram --action check", input_digest=inputs.digest, results=results)

    graph = medial_graph(diagram)
    if args.output:
        Path(args.output).write_text(graph_json(graph), encoding="utf-8")
        logger.info(f"medial graph written to {args.output}")
        results = {"output": args.output}
    else:
        results = {"graph": graph_to_file(graph).model_dump()}
    return RunReport(command="diagram --action medial", input_digest=inputs.digest, results=results)


# Самопроверка на встроенных примерах

THETA_DELTA = "6 - x^1 - x^-1 - y^1 - y^-1 - x^1 y^-1 - x^-1 y^1"
GENUS2_DELTA = (
    "24 - 5x - 5x^-1 - 5y - 5y^-1 - 5u - 5u^-1 - 5v - 5v^-1"
    " + u x + u^-1 x^-1 + u x^-1 + u^-1 x + v x + v^-1 x^-1 + v x^-1 + v^-1 x"
    " + u y + u^-1 y^-1 + u y^-1 + u^-1 y + v y + v^-1 y^-1 + v y^-1 + v^-1 y"
)
GENUS2_DUAL_DELTA = "8 - x - x^-1 - y - y^-1 - u - u^-1 - v - v^-1"
TORUS_DELTAS = {
    "torus_g1": "-2 + x + x^-1 + y + y^-1 - x^-1 y - x y^-1",
    "torus_g2": "-2 + x + x^-1 - y - y^-1 + x^-1 y + x y^-1",
    "torus_g3": "-2 - x - x^-1 + y + y^-1 + x^-1 y + x y^-1",
}
TORUS_SUBSTITUTION = "x=y^-1, y=x^1 y^-1"
SATELLITE_DELTA = "4 - x - x^-1 - 3y - 3y^-1 + 2x y^-1 + 2x^-1 y"
FAMILY_TUPLES = ((1, 1, 1), (2, 1, 1), (3, 2, 1))


def family_delta(k: int, l: int, m: int) -> LaurentPoly:
    """2(k+l+m) - k(x+x^-1) - l(y+y^-1) - m(x^-1 y+x y^-1)."""
    variables = VariableSet(1)
    return parse_poly(
        f"{2 * (k + l + m)} - {k}x - {k}x^-1 - {l}y - {l}y^-1 - {m}x^-1 y - {m}x y^-1".replace("- -", "+ "),
        variables,
    )


def _load(name: str) -> SignedGraph:
    return graph_from_json(samples.read_sample(name), source=name)


def _triple_agreement(graph: SignedGraph) -> bool:
    values = [delta(graph, method) for method in METHODS]
    return values[0] == values[1] == values[2]


def _check_theta() -> bool:
    graph = _load("theta")
    return all(str(delta(graph, method)) == THETA_DELTA for method in METHODS)


def _check_theta_dual() -> bool:
    return delta(_load("theta_dual")) == delta(_load("theta"))


def _check_modules() -> bool:
    return str(module_invariants(_load("theta"))) == "Z + Z/3" and str(module_invariants(_load("theta_dual"))) == "Z"


def _check_genus2() -> bool:
    primal, dual = _load("genus2"), _load("genus2_dual")
    return delta(primal) == parse_poly(GENUS2_DELTA, primal.variables) and delta(dual) == parse_poly(
        GENUS2_DUAL_DELTA, dual.variables
    )


def _check_torus() -> bool:
    variables = VariableSet(1)
    deltas = {name: delta(_load(name)) for name in TORUS_DELTAS}
    exact = all(deltas[name] == parse_poly(text, variables) for name, text in TORUS_DELTAS.items())
    distinct = len(set(deltas.values())) == 3
    image = substitute(deltas["torus_g1"], parse_substitution(TORUS_SUBSTITUTION, variables))
    return exact and distinct and image in (deltas["torus_g2"], deltas["torus_g3"])


def _check_family() -> bool:
    for k, l, m in FAMILY_TUPLES:
        expected = family_delta(k, l, m)
        dual = family_dual_skeleton(k, l, m)
        primal = medial_graph(family_diagram(k, l, m))
        certificate = genus_certificate(delta(primal), delta(dual), 1)
        if delta(dual) != expected or delta(primal) != expected or certificate.virtual_genus != 1:
            return False
    return True


def _check_satellite() -> bool:
    graph = _load("satellite")
    value = delta(graph)
    certificate = genus_certificate(value, None, 1)
    return value == parse_poly(SATELLITE_DELTA, graph.variables) and certificate.virtual_genus == 1


def _check_challenge() -> bool:
    value = delta(_load("challenge"))
    return not value and not genus_certificate(value, None, 1).conclusive


def _check_random(seed: int, count: int) -> bool:
    for i in range(count):
        graph = random_graph(seed + i, 1 + i % 5, i % 8, i % 3, 2)
        value = delta(graph)
        if not _triple_agreement(graph) or augment(value) != 0 or bar(value) != value:
            logger.warning(f"random graph with seed {seed + i} violates the Δ properties")
            return False
    return True


def _check_medial() -> bool:
    medial = medial_graph(diagram_from_json(samples.read_sample("ell1.diagram")))
    odd = diagram_from_json(samples.read_sample("odd.diagram"))
    odd_report = check_checkerboard([r.id for r in odd.regions], odd.arcs)
    return graph_json(medial) == graph_json(_load("theta")) and not odd_report.colorable


def _check_duals() -> bool:
    theta = _load("theta")
    dual = dual_signs(theta, _load("theta_dual"))
    union = disjoint_union(theta, dual)
    return delta(dual) == -delta(theta) and delta(union) == delta(theta) * delta(dual)


SELFTEST_CHECKS: dict[str, Callable[[], bool]] = {
    "theta": _check_theta,
    "theta_dual": _check_theta_dual,
    "module": _check_modules,
    "genus2": _check_genus2,
    "torus": _check_torus,
    "family": _check_family,
    "satellite": _check_satellite,
    "challenge": _check_challenge,
    "medial": _check_medial,
    "dual_signs": _check_duals,
}


def cmd_selftest(args: argparse.Namespace, inputs: InputSet) -> RunReport:
    """Проверки на встроенных примерах и совпадение трёх методов на случайных графах."""
    count = settings.selftest_random_graphs if args.count is None else args.count
    results: dict = {}
    for name, check in SELFTEST_CHECKS.items():
        results[name] = "PASS" if check() else "FAIL"
        logger.info(f"selftest {name}: {results[name]}")
    results["random"] = "PASS" if _check_random(args.seed, count) else "FAIL"
    status = "PASS" if all(value == "PASS" for value in results.values()) else "FAIL"
    return RunReport(command=f"selftest --seed {args.seed}", input_digest=inputs.digest, status=status, results=results)


COMMANDS: dict[str, Callable[[argparse.Namespace, InputSet], RunReport]] = {
    "poly": cmd_poly,
    "module": cmd_module,
    "genus": cmd_genus,
    "moves": cmd_moves,
    "diagram": cmd_diagram,
    "selftest": cmd_selftest,
}


# Разбор аргументов и вывод отчёта


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("human", "machine"), default=settings.report_format, help="Формат отчёта"
    )
    common.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default=settings.log_level.upper(),
        help="Уровень логирования",
    )
    common.add_argument(
        "--timing", action="store_true", default=settings.report_timing, help="Добавить время выполнения в отчёт"
    )

    parser = argparse.ArgumentParser(
        prog="surface-laplacian",
        description="Многочлены и модули Лапласа знаковых графов со связностями на поверхностях",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    poly = commands.add_parser("poly", parents=[common], help="Многочлен Лапласа Δ_G")
    poly.add_argument("graph", help="Файл графа или имя встроенного примера")
    poly.add_argument("--method", choices=(*METHODS, "all"), default="det", help="Способ вычисления")
    poly.add_argument("--substitute", help='Замена базиса, например "x=y^-1, y=x^1 y^-1"')

    module = commands.add_parser("module", parents=[common], help="Модуль Лапласа (целочисленная тень)")
    module.add_argument("graph", help="Файл графа или имя встроенного примера")
    module.add_argument("--output", help="Куда записать матрицу представления (JSON)")

    genus = commands.add_parser("genus", parents=[common], help="Сертификат виртуального рода")
    genus.add_argument("graph", help="Файл графа G")
    genus.add_argument("--dual", help="Файл дуального графа G*")

    moves = commands.add_parser("moves", parents=[common], help="Ходы Рейдемейстера на графах")
    moves.add_argument("graph", help="Файл графа")
    moves.add_argument("--move", choices=("rg1", "rg2", "rg3"), required=True, help="Ход")
    moves.add_argument("--vertex", help="Вершина хода (rg1, rg3)")
    moves.add_argument("--anchor", help="Вершина, к которой присоединяется новая висячая вершина (rg1 --add)")
    moves.add_argument("--first", help="Первый конец пары рёбер (rg2)")
    moves.add_argument("--second", help="Второй конец пары рёбер (rg2, по умолчанию равен --first)")
    moves.add_argument("--sign", type=int, choices=(1, -1), default=1, help="Знак нового ребра")
    moves.add_argument("--connection", default="1", help="Связность нового ребра")
    moves.add_argument("--edge-ids", help="Id новых рёбер через запятую")
    direction = moves.add_mutually_exclusive_group()
    direction.add_argument("--add", dest="direction", action="store_const", const="add", help="Добавить конфигурацию")
    direction.add_argument(
        "--remove", dest="direction", action="store_const", const="remove", help="Удалить конфигурацию"
    )
    moves.add_argument("--output", help="Куда записать преобразованный граф")

    diagram = commands.add_parser("diagram", parents=[common], help="Диаграммы зацеплений")
    diagram.add_argument("diagram", help="Файл диаграммы или имя встроенного примера")
    diagram.add_argument("--action", choices=("check", "medial"), default="check", help="Действие")
    diagram.add_argument("--output", help="Куда записать медиальный граф")

    selftest = commands.add_parser("selftest", parents=[common], help="Самопроверка")
    selftest.add_argument("--seed", type=int, default=0, help="Начальное зерно случайных графов")
    selftest.add_argument("--count", type=int, help="Число случайных графов")
    return parser


def _render_value(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False, sort_keys=True)


def render_report(report: RunReport, output_format: str) -> str:
    """Текст отчёта: human - строки "ключ: значение", machine - JSON с отсортированными ключами."""
    if output_format == "machine":
        payload = report.model_dump(mode="json", exclude_none=True)
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    lines = [f"command: {report.command}"]
    for key, value in report.results.items():
        if isinstance(value, dict) and all(isinstance(v, str) for v in value.values()):
            lines.extend(f"{key} [{name}]: {text}" for name, text in value.items())
        else:
            lines.append(f"{key}: {_render_value(value)}")
    lines.append(f"status: {report.status}")
    if report.timing_ms is not None:
        lines.append(f"timing_ms: {report.timing_ms:.3f}")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Точка входа CLI.

    Returns:
        0 - успех или PASS, 1 - FAIL, 2 - ошибка входных данных
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(args.log_level)

    logger.info(f"command {args.command} started")
    inputs = InputSet()
    started = time.perf_counter()
    try:
        report = COMMANDS[args.command](args, inputs)
    except ColorabilityError as exc:
        logger.warning(f"rejected input: {exc}")
        print(f"error: {exc}; odd cycle: {', '.join(exc.odd_cycle)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (SurfaceLaplacianError, OSError) as exc:
        logger.warning(f"rejected input: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.timing:
        report = report.model_copy(update={"timing_ms": (time.perf_counter() - started) * 1000})
    sys.stdout.write(render_report(report, args.format))
    logger.info(f"command {args.command} finished: {report.status}")
    return EXIT_FAIL if report.status == "FAIL" else EXIT_OK

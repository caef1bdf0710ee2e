import pytest

from surface_laplacian import samples
from surface_laplacian.diagram import diagram_from_json
from surface_laplacian.graph import graph_from_json
from surface_laplacian.ring import VariableSet

THETA_DELTA = "6 - x^1 - x^-1 - y^1 - y^-1 - x^1 y^-1 - x^-1 y^1"


@pytest.fixture
def torus() -> VariableSet:
    return VariableSet(1)


@pytest.fixture
def load_graph():
    """Загрузка встроенного примера графа по имени."""

    def load(name: str):
        return graph_from_json(samples.read_sample(name), source=name)

    return load


@pytest.fixture
def load_diagram():
    def load(name: str):
        return diagram_from_json(samples.read_sample(name), source=name)

    return load


@pytest.fixture
def theta(load_graph):
    return load_graph("theta")

"""Bundled example graphs and diagrams."""

from importlib import resources

from surface_laplacian.errors import InputFormatError


def sample_names() -> list[str]:
    """Имена всех примеров (без расширения .json)."""
    files = resources.files(__name__).iterdir()
    return sorted(item.name.removesuffix(".json") for item in files if item.name.endswith(".json"))


def read_sample(name: str) -> bytes:
    """
    Байты примера по имени: "theta", "theta.json" или "ell1.diagram".

    Raises:
        InputFormatError: Если примера с таким именем нет
    """
    filename = name if name.endswith(".json") else f"{name}.json"
    resource = resources.files(__name__) / filename
    if not resource.is_file():
        raise InputFormatError(f"no such file or bundled sample: {name} (bundled: {', '.join(sample_names())})")
    return resource.read_bytes()

"""Built-in example diagrams shipped with the package."""

from importlib import resources

from ..diagram import Diagram, parse

NAMES = ("circle", "fig5", "theta", "hopf", "trefoil")


def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.json").read_text()


def load_fixture(name: str) -> Diagram:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return parse(fixture_text(name))

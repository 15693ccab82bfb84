import json
from pathlib import Path

import pytest

from bentbook.formats import read_set
from bentbook.quadperm import Perm

FIXTURES = Path(__file__).parent / "fixtures"
ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240607, help="seed for sampled property tests")
    parser.addoption("--force", action="store_true", help="run minutes-scale stretch checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--force"):
        return
    skip = pytest.mark.skip(reason="stretch check; pass --force to run")
    for item in items:
        if "stretch" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture(scope="session")
def rho():
    """rho[1..12] in the reference numbering; rho[0] is I_4."""
    perms, _ = read_set(FIXTURES / "is4_reference_order.json")
    return [Perm.identity(4)] + perms


@pytest.fixture(scope="session")
def reference():
    return json.loads((FIXTURES / "reference_values.json").read_text())


def load_set(name: str) -> list[Perm]:
    return read_set(FIXTURES / name)[0]


@pytest.fixture(scope="session")
def pi1():
    return load_set("pi1.json")


@pytest.fixture(scope="session")
def pi3():
    return load_set("pi3.json")

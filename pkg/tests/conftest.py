from pathlib import Path

import pytest

from sgg import example_graph_path
from sgg.scene_graph import load_graph_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def example_graph():
    return load_graph_file(example_graph_path())


@pytest.fixture(scope="session")
def graphs():
    return {name: load_graph_file(FIXTURES / f"{name}_graph.json") for name in ("small", "large")}


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: list[str] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

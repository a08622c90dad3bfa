import io

import pytest

from dssgraph import load_edge_list

from oracles import TOY_TEXT


@pytest.fixture
def toy():
    return load_edge_list(io.StringIO(TOY_TEXT))


@pytest.fixture
def v(toy):
    """Internal id of a toy-network label."""
    return toy.vertex_of


CRITERIA_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line and fail the test when the criterion does."""

    def record(name: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        CRITERIA_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from kropina_einstein import catalog

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Append a PASS/FAIL line for an acceptance criterion and print it."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def so3():
    return catalog.so_algebra(3)


@pytest.fixture(scope="session")
def su2():
    return catalog.su2_algebra()

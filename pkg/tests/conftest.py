import numpy as np
import pytest

from acoentropy.tsplib import Instance

RECTANGLE = ((0.0, 0.0), (0.0, 3.0), (4.0, 3.0), (4.0, 0.0))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rectangle():
    return Instance(name="rect4", dimension=4, coords=RECTANGLE)


def random_instance(n, seed, scale=1000):
    rng = np.random.default_rng(seed)
    coords = tuple((float(x), float(y)) for x, y in rng.integers(0, scale, size=(n, 2)))
    return Instance(name=f"rand{n}_{seed}", dimension=n, coords=coords)


@pytest.fixture
def report():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def add(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

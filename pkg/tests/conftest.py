import os

import numpy as np
import pytest

from liftlab.graphs import (
    build_barbell,
    build_complete_minus_edge,
    build_cycle,
    build_torus,
    factor_graph,
)

# graphs and parameter grid shared by the lifting / dynamics checks
GRAPH_SPECS = (
    [("cycle", n, build_cycle) for n in (4, 8, 16, 32)]
    + [("torus", k, build_torus) for k in (3, 4, 5)]
    + [("barbell", k, build_barbell) for k in (3, 4, 5)]
    + [("k4minus", 4, build_complete_minus_edge)]
)
GAMMAS = (0.25, 0.5, 1.0, 1.5)
RHOS = (0.1, 1.0, 10.0)


def graph_id(spec):
    return f"{spec[0]}{spec[1]}"


@pytest.fixture(params=GRAPH_SPECS, ids=graph_id)
def family_fg(request):
    _, size, builder = request.param
    return factor_graph(builder(size))


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("LIFTLAB_SEED", "0")))


@pytest.fixture
def c4():
    return factor_graph(build_cycle(4))


@pytest.fixture
def k4m():
    return factor_graph(build_complete_minus_edge(4))


# -- acceptance report ----------------------------------------------------------

_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    """Record the one-line verdict of an acceptance criterion."""

    def _record(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE_LINES[number])
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[number])

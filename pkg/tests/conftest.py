import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sandwich_forms import form_from_graph, path_graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def p3():
    """Path on three nodes, unit edges and masses, no killing."""
    return form_from_graph(path_graph(3))


@pytest.fixture
def p3_killing():
    """The same path with killing 5 at the middle node."""
    return form_from_graph(path_graph(3, killing=[0, 5, 0]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])

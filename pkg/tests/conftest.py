import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hodgesolve import generators
from hodgesolve.complex import EmbeddedComplex
from hodgesolve.solver import SolverContext

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def triangle_complex():
    return EmbeddedComplex([0, 1, 2], np.eye(3), [None, [[0, 1], [0, 2], [1, 2]], [[0, 1, 2]], None])


@pytest.fixture(scope="session")
def tet():
    return generators.tetrahedron()


@pytest.fixture(scope="session")
def disk():
    return generators.punctured_disk(0, np.random.default_rng(0))


@pytest.fixture(scope="session")
def annulus():
    return generators.annulus_in_ball(3, np.random.default_rng(0))


@pytest.fixture(scope="session")
def pd2():
    return generators.punctured_disk(2, np.random.default_rng(0))


@pytest.fixture(scope="session")
def stacked3():
    return generators.stacked_annuli(3, 3, np.random.default_rng(0))


@pytest.fixture(scope="session")
def ctx_annulus(annulus):
    return SolverContext.prepare(annulus, 0.05, rng=np.random.default_rng(0))


@pytest.fixture(scope="session")
def ctx_pd2(pd2):
    return SolverContext.prepare(pd2, 0.05, rng=np.random.default_rng(0))


@pytest.fixture(scope="session")
def ctx_disk(disk):
    return SolverContext.prepare(disk, 0.05, rng=np.random.default_rng(0))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])

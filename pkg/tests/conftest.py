import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pelastica import moduli

settings.register_profile(
    "pelastica",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pelastica")


@pytest.fixture(scope="session")
def p3():
    return moduli.p3()


@pytest.fixture(scope="session")
def p5():
    return moduli.p_mn(5, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def half_pi():
    return 0.5 * math.pi


_VERDICTS_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS_KEY] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line; the test still asserts on its own."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        request.config.stash[_VERDICTS_KEY].append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(config.stash.get(_VERDICTS_KEY, []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)

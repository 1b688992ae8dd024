import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from clocksta.perturbation import expand_map
from clocksta.protocols import STASchedule, make_finite_protocol, make_infinite_protocol, make_tabulated_protocol

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def finite_schedule():
    return STASchedule(make_finite_protocol(1.0, 2.0, 1.0))


@pytest.fixture(scope="session")
def finite_pmap(finite_schedule):
    return expand_map(finite_schedule)


@pytest.fixture(scope="session")
def infinite_schedule():
    # loose truncation: long-window runs belong to the acceptance suite
    return STASchedule(make_infinite_protocol(1.0, 2.0, 0.2, 1e-3))


@pytest.fixture(scope="session")
def infinite_pmap(infinite_schedule):
    return expand_map(infinite_schedule)


@pytest.fixture(scope="session")
def constant_schedule():
    t = np.linspace(0.0, 2.0, 9)
    return STASchedule(make_tabulated_protocol(np.c_[t, np.full_like(t, 1.5)]))


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)

import math

import numpy as np
import pytest

from weakvalue.optics import strength_from_G


@pytest.fixture
def g029():
    return strength_from_G(0.29)


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


def deg(x):
    return math.degrees(x)


_acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    _acceptance_lines.append((int(number), f"[{status}] criterion {number:>2}: {title}"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)

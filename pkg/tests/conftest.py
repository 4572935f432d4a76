import time

import numpy as np
import pytest
from hypothesis import strategies as st

from planar_bilinear.mat2 import Mat2

entries = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
mats = st.builds(Mat2, entries, entries, entries, entries)


def random_mat(rng, scale=1.0) -> Mat2:
    return Mat2(*map(float, scale * rng.standard_normal(4)))


def rel_close(lhs, rhs, scale, tol):
    return abs(lhs - rhs) <= tol * (1.0 + abs(scale))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[tuple[int, str], bool] = {}
# criteria that also bound the wall time of the whole session, in seconds
SUITE_TIME_LIMITS = {8: 30.0}
_SESSION_START = [0.0]


def pytest_sessionstart(session):
    _SESSION_START[0] = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        key = (marker.args[0], marker.args[1])
        _CRITERIA[key] = _CRITERIA.get(key, True) and report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    elapsed = time.perf_counter() - _SESSION_START[0]
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_CRITERIA.items()):
        note = ""
        if number in SUITE_TIME_LIMITS:
            limit = SUITE_TIME_LIMITS[number]
            ok = ok and elapsed < limit
            note = f"  (session {elapsed:.1f} s, limit {limit:.0f} s)"
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}{note}")

import os
import sys
import time

import pytest
from hypothesis import HealthCheck, settings

sys.setrecursionlimit(20000)

settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    max_examples=int(os.environ.get("CARTLOG_TEST_EXAMPLES", "60")),
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repro")


import registry  # noqa: E402

registry.install()

ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_collection_modifyitems(session, config, items):
    # the acceptance gate runs last so the soundness sweep sees every other proof
    items.sort(key=lambda it: it.fspath.basename == "test_acceptance.py")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item._cartlog_elapsed = time.perf_counter() - start


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    ACCEPTANCE[n] = ("PASS" if rep.passed else "FAIL", title, getattr(item, "_cartlog_elapsed", 0.0))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, secs = ACCEPTANCE[n]
        tr.write_line(f"criterion {n:2d} [{status}] {title} ({secs:.1f}s)")
    passed = sum(1 for s, _, _ in ACCEPTANCE.values() if s == "PASS")
    tr.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")

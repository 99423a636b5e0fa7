import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def sum_mt_cert():
    from cantorsum.certify import certify_sum_circle_middle_third
    return certify_sum_circle_middle_third()


@pytest.fixture(scope="session")
def thick_cert():
    from cantorsum import CircleSum, build_self_similar, certify_thickness
    K = build_self_similar("2/5", 12)
    return certify_thickness(K, K, CircleSum(), claim="sum-circle-thickness")


@pytest.fixture(scope="session")
def pnorm_cert():
    from cantorsum import build_self_similar, certify_pinned_pnorm
    return certify_pinned_pnorm(build_self_similar("2/5", 12), (0.0, 0.0), 2.0)


ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, title = mark.args
    prev = ACCEPTANCE.get(n, (title, True))
    ok = prev[1] and not rep.failed
    ACCEPTANCE[n] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}")

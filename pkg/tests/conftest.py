"""Shared fixtures and the per-criterion summary of the acceptance suite."""

import numpy as np
import pytest

CRITERIA = {
    1: "homotopy value",
    2: "oracle equivalence",
    3: "multiplicative factorization",
    4: "exact invariances",
    5: "shuffle suites",
    6: "Chen suites",
    7: "L-recursion",
    8: "Goursat",
    9: "continuity bound",
    10: "universality moments",
}

_results: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = marker.args[0]
    if report.outcome == "passed" and not hasattr(report, "wasxfail"):
        status = "pass"
    elif hasattr(report, "wasxfail") and report.outcome == "skipped":
        status = "xfail"
    else:
        status = "fail"
    _results.setdefault(n, []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _results:
            continue
        statuses = [s for _, s in _results[n]]
        if all(s == "pass" for s in statuses):
            line = "PASS"
        elif "fail" in statuses:
            line = "FAIL"
        else:
            failed = [name for name, s in _results[n] if s == "xfail"]
            line = "FAIL (known shortfall, strict xfail: " + ", ".join(failed) + ")"
        tr.write_line(f"criterion {n:>2} {CRITERIA[n]:<30} {line}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

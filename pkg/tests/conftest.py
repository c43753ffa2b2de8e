"""Collects acceptance-test outcomes and prints one verdict line each."""

import re

_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")

_TITLES = {
    1: "exponent algebra matches the bisection oracle",
    2: "superlinearity condition is equivalent to pq > 1",
    3: "existence-region regimes place the pq = 1 marker correctly",
    4: "restricted operator sits strictly below the spectral one",
    5: "collocation matches principal-value quadrature",
    6: "reference solve agrees with the dense collocation oracle",
    7: "weighted solve is resolution-stable and positive",
    8: "energy norm grows monotonically along the critical sweep",
    9: "bootstrap chains reach the boundedness flag",
    10: "energy bookkeeping is self-consistent",
}

_outcomes = {}


def pytest_runtest_logreport(report):
    match = _PATTERN.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(number, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        outcomes = _outcomes[number]
        if all(o == "passed" for o in outcomes):
            verdict = "pass"
        elif any(o == "failed" for o in outcomes):
            verdict = "FAIL"
        else:
            verdict = "skipped"
        title = _TITLES.get(number, "")
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  ({title})")

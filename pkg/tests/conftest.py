"""Collects the acceptance results and prints one line per criterion."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = marker.args
        detail = dict(item.user_properties).get("detail")
        if detail is None:
            detail = f"error: {call.excinfo.value}" if call.excinfo is not None else ""
        _RESULTS[num] = (title, rep.outcome, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, outcome, detail = _RESULTS[num]
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"[{status}] {num:2d}. {title}: {detail}")
    n_pass = sum(o == "passed" for _, o, _ in _RESULTS.values())
    tr.write_line(f"{n_pass}/{len(_RESULTS)} criteria passed")

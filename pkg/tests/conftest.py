import pytest

RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, text = marker.args
    note = getattr(item, "criterion_note", "")
    RESULTS[n] = ("PASS" if rep.passed else "FAIL", text, note)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, text, note = RESULTS[n]
        line = f"AC{n:>2} {status}: {text}"
        if note:
            line += f" [{note}]"
        terminalreporter.write_line(line)

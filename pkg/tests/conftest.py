import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criterion_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    verdict = "PASS" if rep.passed else "FAIL"
    line = f"{verdict} criterion {number}: {title}"
    if rep.failed:
        msg = str(call.excinfo.value).strip().splitlines()
        line += f" ({msg[0]})" if msg else ""
    item.config._criterion_lines.append((number, line))
    print("\n" + line)


def pytest_terminal_summary(terminalreporter, config):
    lines = sorted(config._criterion_lines)
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)

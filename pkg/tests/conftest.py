import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def emit(label, ok, detail, seconds, limit):
        within = seconds < limit
        status = "PASS" if ok and within else "FAIL"
        line = f"{status}  {label}: {detail} [{seconds:.2f}s / limit {limit:g}s]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok and within

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

_REPORT: list[str] = []


@pytest.fixture
def report():
    """Collects acceptance lines; they are printed in the terminal summary."""
    def emit(line):
        print(line)
        _REPORT.append(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)

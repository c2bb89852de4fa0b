import pytest

_LINES = {}


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number, ok, detail):
        _LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        terminalreporter.write_line(_LINES[number])

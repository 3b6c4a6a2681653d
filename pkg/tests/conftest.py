import pytest

CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number, ok, detail):
        CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(CRITERIA[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])

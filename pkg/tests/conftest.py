import pytest

# (criterion number, passed, detail) appended by test_acceptance
ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    def record(number, passed, detail):
        ACCEPTANCE_LINES.append((number, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda line: line[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")

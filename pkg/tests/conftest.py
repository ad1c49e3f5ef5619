import pytest

_REPORT = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""
    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else "")
        _REPORT.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)

import pytest

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def acceptance():
    """Record a named acceptance criterion; failing it fails the test too."""

    def record(name: str, ok: bool, detail: str = ""):
        _criteria.append((name, bool(ok), detail))
        assert ok, f"acceptance criterion failed: {name} {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok, detail in _criteria:
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}{suffix}")

import pytest

_LINES = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion for the summary."""
    lines = request.config.stash.setdefault(_LINES, {})

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        lines[number] = f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}"
        print(lines[number])
        assert ok, lines[number]

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])

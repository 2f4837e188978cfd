import pytest

_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(num, title, ok, detail) and assert ok."""
    def record(num, title, ok, detail=""):
        _RESULTS[num] = (title, bool(ok), detail)
        line = f"[{num:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, ok, detail = _RESULTS[num]
        terminalreporter.write_line(f"[{num:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")

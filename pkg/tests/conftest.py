import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome and fail the test if it did not hold."""

    def check(number: int, title: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
        )

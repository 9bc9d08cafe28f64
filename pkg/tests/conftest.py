import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance_log():
    def log(number: int, title: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE[number] = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"

    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])

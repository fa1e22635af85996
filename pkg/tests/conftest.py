import pytest

#: (number, title, passed, detail) tuples recorded by the acceptance suite
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")


@pytest.fixture
def record():
    def _record(num: int, title: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE.append((num, title, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")
        return ok

    return _record

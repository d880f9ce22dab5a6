"""Shared test plumbing: the acceptance suite's criterion report."""

_criterion_lines: list[str] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    _criterion_lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)

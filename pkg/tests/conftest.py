import contextlib

import pytest

_CRITERIA: dict[int, str] = {}


class _Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.failures = []
        self.detail = ""

    def check(self, cond, message):
        if not cond:
            self.failures.append(message)

    def line(self, error=None):
        ok = error is None and not self.failures
        why = error or "; ".join(self.failures[:3])
        text = f"[{'PASS' if ok else 'FAIL'}] criterion {self.number}: {self.title}"
        if self.detail:
            text += f" ({self.detail})"
        if not ok:
            text += f" -- {why}"
        return ok, text


@pytest.fixture
def criterion():
    """Context manager that records one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def run(number, title):
        c = _Criterion(number, title)
        try:
            yield c
        except Exception as exc:
            _, text = c.line(f"{type(exc).__name__}: {exc}")
            _CRITERIA[number] = text
            print(text)
            raise
        ok, text = c.line()
        _CRITERIA[number] = text
        print(text)
        assert ok, text

    return run


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])

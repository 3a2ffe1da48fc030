import time
from contextlib import contextmanager

import pytest

_RESULTS: dict[int, tuple[str, str, float, str]] = {}


class _Criterion:
    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion with its runtime.

    The body runs the check; the runtime limit is asserted afterwards.
    """

    @contextmanager
    def run(number: int, title: str, limit: float):
        c = _Criterion(number, title, limit)
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield c
            elapsed = time.perf_counter() - start
            if elapsed > limit:
                c.detail = f"{c.detail}; runtime {elapsed:.2f}s over {limit:g}s".lstrip("; ")
                raise AssertionError(c.detail)
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            _RESULTS[number] = (title, status, elapsed, c.detail)
            print(f"[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s) {c.detail}")

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, elapsed, detail = _RESULTS[number]
        line = f"{status}  {number:2d}  {title}  [{elapsed:.2f}s]"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)

import contextlib
import time

import pytest

_RESULTS: list[str] = []


class AcceptanceRecorder:
    """Records one PASS/FAIL line per acceptance criterion."""

    def __init__(self, stash: list[str]):
        self._stash = stash

    @contextlib.contextmanager
    def criterion(self, number: int, name: str):
        detail: dict[str, object] = {}
        start = time.perf_counter()
        ok = False
        try:
            yield detail
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            extra = " ".join(f"{k}={v}" for k, v in detail.items())
            line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({elapsed:.2f}s) {extra}".rstrip()
            self._stash.append(line)
            print(line)


@pytest.fixture
def acceptance():
    return AcceptanceRecorder(_RESULTS)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)

from __future__ import annotations

import json
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

GOLDEN = HERE / "golden"

_ACCEPTANCE_LINES: list[str] = []


def golden(name: str) -> dict:
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture
def verdict():
    """Record and print one acceptance line: ``[C<k>] PASS|FAIL <what> (<detail>)``."""

    def _record(criterion: int, ok: bool, what: str, detail: str = "") -> bool:
        line = f"[C{criterion}] {'PASS' if ok else 'FAIL'} {what}" + (f" ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s[2 : s.index("]")])):
            terminalreporter.write_line(line)

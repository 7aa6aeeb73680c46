from __future__ import annotations

import functools

# criterion number -> (title, passed); filled by the @criterion decorator
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def criterion(number: int, title: str):
    """Mark a test as acceptance criterion `number`; its outcome is listed in the summary."""
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            ACCEPTANCE[number] = (title, False)
            fn(*args, **kwargs)
            ACCEPTANCE[number] = (title, True)
        return run
    return wrap


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")

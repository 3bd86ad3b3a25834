"""Shared pytest hooks.

Acceptance tests record one verdict per criterion in ``ACCEPTANCE``; the
terminal summary prints them as ``CRITERION n: PASS|FAIL - detail`` lines.
"""

ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(f"{line} - {detail}" if detail else line)

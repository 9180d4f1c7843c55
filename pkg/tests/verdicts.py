"""Collects one PASS/FAIL line per acceptance criterion for the end-of-run summary."""

import re

LINES: list[str] = []


def record(number, ok: bool, detail: str, seconds: float):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
    LINES.append(line)
    print(line)
    return ok


def order(line: str):
    m = re.match(r"criterion (\d+)", line)
    return (int(m.group(1)), line) if m else (99, line)

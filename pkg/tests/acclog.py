"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def record(crit, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}"
    LINES.append(line)
    print(line)
    return ok

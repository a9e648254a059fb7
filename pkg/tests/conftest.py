import pytest

CRITERIA = {
    1: "tabulated sudden-change points",
    2: "no sudden change for phase flip",
    3: "depolarizing revival",
    4: "TDD freezing",
    5: "GADC TDD gap",
    6: "closed form vs Kraus",
    7: "QD oracle",
    8: "measure axioms",
    9: "two-sided constraint curves",
    10: "verify determinism",
}

RESULTS: dict[int, list[tuple[str, bool]]] = {}


@pytest.fixture
def record():
    """Log one sub-check of an acceptance criterion; returns the verdict."""

    def _record(criterion: int, label: str, ok) -> bool:
        RESULTS.setdefault(criterion, []).append((label, bool(ok)))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance")
    for c in sorted(CRITERIA):
        checks = RESULTS.get(c)
        if checks is None:
            tr.write_line(f"criterion {c:2d} ({CRITERIA[c]}): NOT RUN")
            continue
        failed = [label for label, ok in checks if not ok]
        verdict = "FAIL" if failed else "PASS"
        line = f"criterion {c:2d} ({CRITERIA[c]}): {verdict} [{len(checks) - len(failed)}/{len(checks)}]"
        if failed:
            line += " failing: " + ", ".join(failed)
        tr.write_line(line)

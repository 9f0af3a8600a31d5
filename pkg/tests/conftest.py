import pytest

# criterion number -> list of (part, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    def _record(number, part, passed, detail=""):
        ACCEPTANCE.setdefault(number, []).append((part, bool(passed), detail))
        print(f"criterion {number} [{part}]: {'PASS' if passed else 'FAIL'} {detail}".rstrip())
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p for _, p, _ in parts)
        failed = [name for name, p, _ in parts if not p]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (failing: " + ", ".join(failed) + ")"
        terminalreporter.write_line(line)

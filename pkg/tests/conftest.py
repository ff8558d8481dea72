import pytest

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(k: int, ok: bool, detail: str = ""):
        prev = ACCEPTANCE.get(k)
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(x for x in (prev[1], detail) if x)
        ACCEPTANCE[k] = (ok, detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return _record

import pytest

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}
EXPECTED = [str(i) for i in range(1, 15)]


@pytest.fixture
def record():
    def _record(cid: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE[cid] = (ok, detail)
        print(f"criterion {cid}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    ids = EXPECTED + sorted(set(ACCEPTANCE) - set(EXPECTED))
    for cid in ids:
        ok, detail = ACCEPTANCE.get(cid, (False, "did not complete"))
        tr.write_line(f"criterion {cid:>3}: {'PASS' if ok else 'FAIL'}  {detail}")

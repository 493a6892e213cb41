import pytest

from energycoop import SystemParams

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def common():
    """Common numerical-study parameters (M = 7, Ps = 1e-10)."""
    return SystemParams()


@pytest.fixture
def fig2_params():
    return SystemParams(M=6, Ps=5e-11)


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])

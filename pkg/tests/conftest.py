import numpy as np
import pytest

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record an acceptance criterion's outcome before asserting it."""

    def record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE[name] = (bool(passed), detail)
        return bool(passed)

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20211014)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0][2:])):
        passed, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")

"""Shared fixtures: the nine-transaction demo database and repo paths."""

from pathlib import Path

import pytest

from keymine.mining import TransactionDB

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"

MARKET9_ROWS = [
    ("T100", ["I1", "I2", "I5"]),
    ("T200", ["I2", "I4"]),
    ("T300", ["I2", "I3"]),
    ("T400", ["I1", "I2", "I4"]),
    ("T500", ["I1", "I3"]),
    ("T600", ["I2", "I3"]),
    ("T700", ["I1", "I3"]),
    ("T800", ["I1", "I2", "I3", "I5"]),
    ("T900", ["I1", "I2", "I3"]),
]
MARKET9_UNIVERSE = ("I1", "I2", "I3", "I4", "I5")


@pytest.fixture
def market9() -> TransactionDB:
    return TransactionDB.build(MARKET9_UNIVERSE, MARKET9_ROWS)


@pytest.fixture
def data_dir() -> Path:
    return DATA


# One pass/fail line per acceptance criterion, shown in the terminal summary
# regardless of capture settings. test_acceptance.py appends to this.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"{status}  {name}{suffix}")

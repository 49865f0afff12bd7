import json
import pathlib

import pytest

ORACLE = json.loads((pathlib.Path(__file__).parent / "oracle_values.json").read_text())

ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def oracle():
    return ORACLE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])

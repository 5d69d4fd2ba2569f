import numpy as np
import pytest

from relcosmo import catalog as cat


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def entries():
    return {name: cat.make_entry(name) for name in cat.ENTRY_NAMES}


_CRITERIA = {}


@pytest.fixture
def criterion(request, capsys):
    """Record one PASS/FAIL line per acceptance criterion.

    A criterion that raises before reporting is recorded as FAIL.
    """
    box = {}

    def report(number, ok, detail):
        box["line"] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        box["number"] = number
        _CRITERIA[number] = box["line"]
        with capsys.disabled():
            print("\n" + box["line"])
        return ok

    yield report
    if "line" not in box:
        number = int(request.node.name.split("_")[1])
        _CRITERIA[number] = f"FAIL criterion {number}: raised before reporting"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])

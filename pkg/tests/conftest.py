import numpy as np
import pytest

from tentsio.grid import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_spec():
    return GridSpec(1, 2.0, 32, 1e-2, 1.0, 16)


# one line per acceptance criterion, echoed in the terminal summary
CRITERIA = []


@pytest.fixture
def criterion(capsys):
    def report(k, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
        CRITERIA.append((k, line))
        with capsys.disabled():
            print("\n" + line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERIA):
            terminalreporter.write_line(line)

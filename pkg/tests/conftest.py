import numpy as np
import pytest

from cpnilp import KrausMap


def shift_map():
    return KrausMap([np.array([[0, 1], [0, 0]])])


def two_arrow_map():
    """n=3, d=2: L_1 e_2 = e_1, L_2 e_3 = e_1, everything else killed."""
    L1 = np.zeros((3, 3))
    L1[0, 1] = 1
    L2 = np.zeros((3, 3))
    L2[0, 2] = 1
    return KrausMap([L1, L2])


@pytest.fixture
def shift():
    return shift_map()


@pytest.fixture
def two_arrow():
    return two_arrow_map()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for an acceptance criterion; lines are echoed in the terminal summary."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def _record(name: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

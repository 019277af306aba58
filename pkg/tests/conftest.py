import math

import pytest

EULER_GAMMA = 0.57721566490153286


def direct_zeta(s: float, n: int = 200000) -> float:
    """Partial sum of n**-s plus the integral tail n**(1-s)/(s-1) and half the last term."""
    k = n
    total = math.fsum(j ** -s for j in range(1, k + 1))
    return total + k ** (1 - s) / (s - 1) - 0.5 * k ** -s


@pytest.fixture(scope="session")
def mp():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    return mpmath


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def _report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

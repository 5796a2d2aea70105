import numpy as np
import pytest

from closed_forms import kink_fields
from sgnft import library


@pytest.fixture(scope="session")
def kink():
    """Traveling kink, sign -1, v = 0.5, x0 = 2: (initial data, boundary data)."""
    return library.generate_kink_data(x0=2.0, v=0.5, sign=-1)


@pytest.fixture(scope="session")
def static_kink():
    """``u0 = 4 arctan(exp(-x))``, ``u1 = 0``."""
    return library.stationary_kink_initial_data()


@pytest.fixture(scope="session")
def zero():
    return library.zero_data()


@pytest.fixture(scope="session")
def kink_sympy():
    return kink_fields()


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


VERDICTS = []


@pytest.fixture
def verdict():
    """Record (and print) one pass/fail line for an acceptance criterion."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: _criterion_key(s)):
            terminalreporter.write_line(line)


def _criterion_key(line):
    label = line.split("criterion ", 1)[1].split(":", 1)[0]
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits or 0), label

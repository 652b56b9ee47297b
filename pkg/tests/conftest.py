import numpy as np
import pytest

from cantor_energy.group import CylinderId
from cantor_energy.measure import (
    bernoulli_product,
    cylinder_uniform,
    even_zero_pattern,
    haar,
    pattern_measure,
    random_measure,
    third_zero_pattern,
)


def generator_measures(n):
    """One instance of every generator family at resolution n."""
    return {
        "haar": haar(n),
        "cylinder": cylinder_uniform(CylinderId(min(3, n), 1), n),
        "point": cylinder_uniform(CylinderId(n, (1 << n) - 1), n),
        "even": even_zero_pattern(n),
        "third": third_zero_pattern(n),
        "pattern": pattern_measure([1, 4], n),
        "bernoulli": bernoulli_product(np.linspace(0.1, 0.9, n)),
        "random": random_measure(7, n),
        "sparse": random_measure(8, n, 0.8),
    }


@pytest.fixture
def measures8():
    return generator_measures(8)


ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""
    import contextlib
    import time

    @contextlib.contextmanager
    def run(label):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException:
            ACCEPTANCE.append(("FAIL", label, time.perf_counter() - t0))
            raise
        ACCEPTANCE.append(("PASS", label, time.perf_counter() - t0))

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, seconds in ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {label} ({seconds:.2f}s)")

import numpy as np
import pytest

from concomitant import Dataset, SyntheticSpec, generate

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def record(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE[number] = f"criterion {number:>2}: {status}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(str(k).rstrip("ab")),
                                                 str(k))):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture
def small_ds():
    ds, beta, S = generate(SyntheticSpec(n=30, p=60, seed=3))
    return ds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ds(rng, n, p):
    return Dataset(rng.standard_normal((n, p)), rng.standard_normal(n))

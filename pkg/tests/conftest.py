import numpy as np
import pytest

from slpca.synth import gen_hat, gen_helix

# One seed for every regenerated-data experiment in the suite.
SUITE_SEED = 2

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def helix_data():
    return gen_helix(1000, sigma_x=3.0, sigma=1.0, seed=SUITE_SEED)


@pytest.fixture(scope="session")
def hat_data():
    return gen_hat(1000, sigma=0.5, seed=SUITE_SEED)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

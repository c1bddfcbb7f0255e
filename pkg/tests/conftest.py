import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tatecoh.algebra import preset

settings.register_profile(
    "repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

SELF_INJECTIVE_PRESETS = ["k[t]/t^2@F2", "kC2@F2", "kV4@F2", "exterior(2)@F2", "kC3@F3", "k[t]/t^3@F3"]
FGD_PRESETS = ["T2@F2", "T3@Q", "T3@F3"]


@pytest.fixture(scope="session")
def dual_numbers():
    return preset("k[t]/t^2@F2")


@pytest.fixture(scope="session")
def klein():
    return preset("kV4@F2")


@pytest.fixture(scope="session")
def c2():
    return preset("kC2@F2")


@pytest.fixture(scope="session")
def t2():
    return preset("T2@F2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.format_results():
        terminalreporter.write_line(line)

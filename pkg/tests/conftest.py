import pytest

from recycle_reactor import ReactorParams, detect_attractor

SEED = (0.5, 0.2)


def base(theta_H, f=0.427):
    return ReactorParams(theta_H=theta_H, f=f)


@pytest.fixture(scope="session")
def stationary():
    p = base(-0.001)
    return p, detect_attractor(SEED, p)


@pytest.fixture(scope="session")
def two_periodic():
    p = base(-0.002)
    return p, detect_attractor(SEED, p)


@pytest.fixture(scope="session")
def four_periodic():
    p = base(-0.012, f=0.40)
    return p, detect_attractor(SEED, p)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

import time

import pytest

from bivgarch import fit, model, presets

EX11_SEED = 11

# wall-clock seconds of the expensive session fixtures, read by the acceptance checks
TIMINGS = {}
# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example11_path():
    params, innov = presets.example(11)
    return model.simulate_bivariate(params, innov, n=50_000, burn_in=1000, seed=EX11_SEED)


@pytest.fixture(scope="session")
def example11_fit(example11_path):
    start = time.perf_counter()
    res = fit.fit_bivariate_qmle(example11_path.x, seed=0)
    TIMINGS["example11_fit"] = time.perf_counter() - start
    return res


@pytest.fixture(scope="session")
def example11_t_fit(example11_path):
    return fit.fit_univariate_t_mle(example11_path.x[:, 0])

import numpy as np
import pytest

from isothermic import _kernels

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAS_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])

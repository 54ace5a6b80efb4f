import numpy as np
import pytest

from simland import _accel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["numba", "numpy"])
def kernel_path(request, monkeypatch):
    """Run a test once on each kernel implementation."""
    use = request.param == "numba"
    if use and _accel.numba is None:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", use)
    return request.param


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

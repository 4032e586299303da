import numpy as np
import pytest

from polsqueeze import kernels
from polsqueeze.experiment import default_fiber
from polsqueeze.pulse import TimeGrid
from polsqueeze.spectral import Spectrum

# filled by test_acceptance; printed in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {line}")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


@pytest.fixture
def small_grid():
    return TimeGrid(2048, 5e-12)


@pytest.fixture
def fiber():
    return default_fiber()


def gaussian_spectrum(omega, center, sigma, scale=1.0):
    return Spectrum(omega, scale * np.exp(-((omega - center) ** 2) / (2 * sigma**2)))

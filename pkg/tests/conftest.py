import numpy as np
import pytest

from nanoraman import RcfParams, Spectrum


def lorentz(x, center, fwhm, amplitude=1.0):
    """Analytic Lorentzian written out independently of the package."""
    return amplitude * (0.5 * fwhm) ** 2 / ((x - center) ** 2 + (0.5 * fwhm) ** 2)


@pytest.fixture
def params():
    return RcfParams()


@pytest.fixture
def fit_grid():
    return np.arange(260.0, 310.0 + 1e-9, 0.25)


@pytest.fixture
def lorentz_spectrum():
    x = np.round(np.arange(280.0, 320.0 + 1e-9, 0.1), 10)
    return Spectrum(x, lorentz(x, 300.5, 3.0))


def write_rows(path, rows, header=None):
    lines = [] if header is None else [header]
    lines += [f"{a},{b}" for a, b in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

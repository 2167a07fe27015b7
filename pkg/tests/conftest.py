import math

import numpy as np
import pytest
from scipy import integrate

from tangentpoint.curves import (
    make_circle,
    make_ellipse,
    make_perturbed_circle,
    make_trefoil,
    rescale_to_length,
    resample_arclength,
    sample,
)


def sin_power_oracle(a: float) -> float:
    """Integral of sin(pi w)**a over (0, 1) by QUADPACK with algebraic endpoint weights."""

    def smooth(w):
        if w <= 0.0 or w >= 1.0:
            return 1.0
        return (math.sin(math.pi * w) / (math.pi * w * (1.0 - w))) ** a

    v, _ = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(a, a), epsabs=0.0, epsrel=1e-13, limit=200)
    return v * math.pi**a


@pytest.fixture(scope="session")
def circle1():
    return sample(make_circle(1.0, 2), 256)


@pytest.fixture(scope="session")
def ellipse1():
    """Ellipse with semi-axes 2 and 1 rescaled to length one, natural parametrization."""
    return rescale_to_length(make_ellipse(2.0, 1.0), 1.0)


@pytest.fixture(scope="session")
def ellipse1_arc(ellipse1):
    return resample_arclength(ellipse1, 256)


@pytest.fixture(scope="session")
def perturbed1_arc():
    return resample_arclength(make_perturbed_circle(1.0, 3, 0.1), 256)


@pytest.fixture(scope="session")
def trefoil_arc():
    return resample_arclength(rescale_to_length(make_trefoil(1.0), 1.0), 256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the lines are repeated in the terminal summary."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)

import numpy as np
import pytest
from hypothesis import assume, strategies as st

from elastoshock.states import ShockParameters, derived_scales


def random_params(rng, pattern=None, fmax=1.2, rmax=6.0):
    """Lax-admissible draw: F uniform in [-fmax, fmax], M in (M1, M_star), R in (1, rmax]."""
    F = rng.uniform(-fmax, fmax, 4)
    if pattern == "stretching":
        F[1] = F[2] = 0.0
    elif pattern == "antidiagonal":
        F[0] = F[3] = 0.0
    M1 = np.hypot(F[0], F[1])
    Ms = np.sqrt(1.0 + M1**2)
    M = rng.uniform(M1, Ms)
    while not M1 < M < Ms:
        M = rng.uniform(M1, Ms)
    R = rng.uniform(1.0, rmax)
    while R == 1.0:
        R = rng.uniform(1.0, rmax)
    return ShockParameters(M, R, *F)


def random_scales(rng, pattern=None):
    return derived_scales(random_params(rng, pattern))


@st.composite
def admissible_params(draw, pattern=None):
    f = st.floats(-1.2, 1.2, allow_nan=False)
    F11, F12, F21, F22 = draw(f), draw(f), draw(f), draw(f)
    if pattern == "stretching":
        F12 = F21 = 0.0
    assume(abs(F11 * F22 - F12 * F21) > 1e-6)
    M1 = np.hypot(F11, F12)
    Ms = np.sqrt(1.0 + M1**2)
    t = draw(st.floats(0.02, 0.98))
    R = draw(st.floats(1.01, 6.0))
    return ShockParameters(M1 + t * (Ms - M1), R, F11, F12, F21, F22)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def stretch2():
    return derived_scales(ShockParameters(0.9, 2.0, 0.5, 0.0, 0.0, 0.8))


@pytest.fixture
def stretch4():
    return derived_scales(ShockParameters(0.9, 4.0, 0.5, 0.0, 0.0, 0.8))


ACCEPTANCE = {}


def record(number, passed, detail):
    """Store one acceptance outcome; the terminal summary prints them all."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

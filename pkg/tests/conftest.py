import numpy as np
import pytest
from hypothesis import strategies as st

from fdilab import OscillatorBathModel, decompose


def random_model(rng, n_max=20, omega0=1.0, fill=(0.05, 0.95)):
    """Random valid model using a random share of the positivity budget."""
    n = int(rng.integers(1, n_max + 1))
    omegas = rng.uniform(0.2, 3.0, size=n) * omega0
    eps = rng.uniform(0.1, 1.0, size=n)
    share = rng.uniform(*fill)
    eps *= omega0 * np.sqrt(share / np.sum(eps**2 / omegas**2))
    return OscillatorBathModel(omega0, omegas, eps)


@st.composite
def models(draw, n_max=6):
    """Hypothesis strategy for valid models with a margin from the bound."""
    n = draw(st.integers(1, n_max))
    omegas = draw(st.lists(st.floats(0.2, 3.0), min_size=n, max_size=n))
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    share = draw(st.floats(0.05, 0.9))
    omegas, raw = np.array(omegas), np.array(raw)
    eps = raw * np.sqrt(share / np.sum(raw**2 / omegas**2))
    return OscillatorBathModel(1.0, omegas, eps)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def one_mode():
    """omega0 = 1 with a single bath mode at 2 coupled by 0.5."""
    return OscillatorBathModel(1.0, [2.0], [0.5])


@pytest.fixture
def three_mode():
    return OscillatorBathModel(1.0, [0.7, 1.3, 2.1], [0.3, 0.4, 0.5])


@pytest.fixture
def uncoupled():
    return OscillatorBathModel(1.0)


@pytest.fixture
def three_mode_decomp(three_mode):
    return decompose(three_mode)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number])

import numpy as np
import pytest
from hypothesis import strategies as st

from oscbath.model import Model, spectrum


@st.composite
def stable_models(draw, min_baths=0, max_baths=3, hbar=1.0):
    """Random stable models; couplings are scaled to keep the Schur complement >= 0.19 omega0^2."""
    n = draw(st.integers(min_baths, max_baths))
    omega0 = draw(st.floats(0.5, 2.0))
    omegas = draw(st.lists(st.floats(0.3, 3.0), min_size=n, max_size=n))
    u = draw(st.lists(st.floats(-1.0, 1.0), min_size=n, max_size=n))
    scale = 0.9 * omega0 / np.sqrt(max(n, 1))
    baths = tuple((w, ui * w * scale) for w, ui in zip(omegas, u))
    return Model(omega0, baths, hbar)


def random_model(rng, n_baths, hbar=1.0):
    omega0 = rng.uniform(0.6, 1.8)
    omegas = rng.uniform(0.4, 2.5, n_baths)
    u = rng.uniform(-1.0, 1.0, n_baths)
    g = 0.8 * u * omegas * omega0 / np.sqrt(max(n_baths, 1))
    return Model(omega0, tuple(zip(omegas, g)), hbar)


@pytest.fixture
def model2():
    return Model(1.0, ((1.5, 0.4), (0.7, 0.3)))


@pytest.fixture
def spec2(model2):
    return spectrum(model2)


@pytest.fixture
def model1():
    return Model(1.0, ((1.5, 0.4),))


@pytest.fixture
def spec1(model1):
    return spectrum(model1)


@pytest.fixture
def model3():
    return Model(1.2, ((0.5, 0.2), (1.1, -0.3), (2.0, 0.5)))


@pytest.fixture
def spec3(model3):
    return spectrum(model3)

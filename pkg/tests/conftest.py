import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pcs import spinors as sp

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("slow", deadline=None, max_examples=10, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
rapidities = st.floats(min_value=0.0, max_value=2.0)
spins = st.integers(min_value=0, max_value=10)


@st.composite
def sl2c(draw, max_scale=1.5):
    """Unimodular matrix from a drawn generator (not via a seeded rng)."""
    parts = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=6, max_size=6))
    m = max_scale * np.array([[parts[0] + 1j * parts[1], parts[2] + 1j * parts[3]],
                              [parts[4] + 1j * parts[5], -(parts[0] + 1j * parts[1])]])
    q = np.sqrt(-sp.det2(m) + 0j)
    sinhc = np.sinh(q) / q if abs(q) > 1e-12 else 1.0
    return np.cosh(q) * np.eye(2) + sinhc * m


@st.composite
def unit_vectors(draw):
    v = np.array(draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3)))
    n = np.linalg.norm(v)
    if n < 1e-3:
        return np.array([0.0, 0.0, 1.0])
    return v / n


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

"""Shared hypothesis strategies."""
import numpy as np
from hypothesis import strategies as st

energies = st.floats(min_value=-80.0, max_value=80.0, allow_nan=False)
positive_energies = st.floats(min_value=0.5, max_value=80.0, allow_nan=False)
times = st.floats(min_value=0.0, max_value=20.0, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)

import os
from itertools import combinations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from thetacut.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=0, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@pytest.fixture
def c5():
    from thetacut.generators import gen_cycle

    return gen_cycle(5)


def counterexample():
    """A PSD point of the C5 theta body that the pair-sum cut separates by 0.045."""
    X = np.full((5, 5), 0.209)
    for i in range(5):
        X[i, i] = 0.4
        X[i, (i + 1) % 5] = X[(i + 1) % 5, i] = 0.0
    Y = np.empty((6, 6))
    Y[0, 0] = 1.0
    Y[0, 1:] = Y[1:, 0] = 0.4
    Y[1:, 1:] = X
    return Y

import numpy as np
import pytest

from tracewitness.samplers import Sampler, SamplerConfig


@pytest.fixture
def sampler():
    def make(dim=3, seed=0, stream="tests"):
        return Sampler(SamplerConfig(dim=dim, seed=seed), stream)

    return make


def close(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) <= tol * (1 + np.linalg.norm(b))

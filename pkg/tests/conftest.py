import functools

import pytest
from hypothesis import settings

from framelab.construction import SpectralKernel, build_disjoint_tuple, orthogonalize_translates
from framelab.group import CosetStructure

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@functools.lru_cache(maxsize=None)
def pipeline(N: int, M: int = 64, L_H: int = 5):
    c = CosetStructure.standard(N)
    k = SpectralKernel(N, M)
    o = orthogonalize_translates(c, k, L_H)
    T = build_disjoint_tuple(c, k, o, interior=2, n_tests=20, seed=0)
    return c, k, o, T


@pytest.fixture(scope="session")
def pipe2():
    return pipeline(2)


@pytest.fixture(scope="session")
def pipe3():
    return pipeline(3)

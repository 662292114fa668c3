import random

import pytest
from hypothesis import strategies as st

from zslab.groups import make_group
from zslab.invariants import small_group_pool

# One shared instance per invariant-factor shape so per-group caches are reused.
_POOL = {g.invariant_factors: g for g in small_group_pool(48)}


def pooled_group(factors):
    return _POOL[tuple(factors)]


def group_strategy(max_order=48):
    shapes = sorted(f for f, g in _POOL.items() if g.order <= max_order)
    return st.sampled_from(shapes).map(pooled_group)


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def c3c15():
    return pooled_group((3, 15))


@pytest.fixture
def c3c3():
    return pooled_group((3, 3))

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from onlinerank.graph_core import BipartiteInstance, FullyOnlineInstance

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@st.composite
def bipartite_instances(draw, max_side=6, weighted=False, capacities=False, min_sellers=1):
    n_s = draw(st.integers(min_sellers, max_side))
    n_b = draw(st.integers(0, max_side))
    adj = tuple(
        tuple(sorted(draw(st.sets(st.integers(0, n_s - 1), max_size=n_s))))
        for _ in range(n_b)
    )
    order = tuple(draw(st.permutations(range(n_b))))
    weights = None
    if weighted:
        weights = tuple(draw(st.lists(st.floats(1.0, 1e4), min_size=n_s, max_size=n_s)))
    caps = None
    if capacities:
        caps = tuple(draw(st.lists(st.integers(1, 3), min_size=n_s, max_size=n_s)))
    return BipartiteInstance(n_s, n_b, adj, order, weights, caps)


@st.composite
def fully_online_instances(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    stamps = draw(st.permutations(range(2 * n)))
    intervals = [tuple(sorted((stamps[2 * v], stamps[2 * v + 1]))) for v in range(n)]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [e for e in pairs if draw(st.booleans())]
    return FullyOnlineInstance.from_intervals(intervals, edges)


def rank_vectors(dim):
    # distinct coordinates keep argsort and rank order consistent
    return st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=dim, max_size=dim,
                    unique=True)


@st.composite
def separated_rank_vectors(draw, dim, gap=1e-6):
    """Ranks whose pairwise gaps survive the exp() in weighted scores."""
    slots = draw(st.lists(st.integers(0, int(1 / gap) - 1), min_size=dim, max_size=dim,
                          unique=True))
    return [k * gap for k in slots]


@pytest.fixture
def single_edge():
    return BipartiteInstance(1, 1, ((0,),), (0,))


@pytest.fixture
def single_edge_weighted():
    return BipartiteInstance(1, 1, ((0,),), (0,), weights=(1.0,))


@pytest.fixture
def triangle_together():
    # all three present at once; departures u < v < w
    return FullyOnlineInstance.from_intervals([(0, 3), (1, 4), (2, 5)], [(0, 1), (0, 2), (1, 2)])


def frac(a, b=1):
    return Fraction(a, b)

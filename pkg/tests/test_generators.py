import math

import numpy as np
import pytest

from onlinerank.generators import (FIGURE1_HEAVY, GeneratorSpec, gen_disjoint_perfect, gen_figure1,
                                   gen_random_bipartite, gen_random_fully_online,
                                   gen_upper_triangular, generate)
from onlinerank.graph_core import validate


def test_upper_triangular_shape():
    g = gen_upper_triangular(4)
    assert g.adjacency == ((0, 1, 2, 3), (1, 2, 3), (2, 3), (3,))
    assert g.n_edges == 10 and g.arrival_order == (0, 1, 2, 3)


def test_figure1_shape():
    g = gen_figure1()
    assert g.weights == (1.0, FIGURE1_HEAVY) and g.adjacency == ((0, 1),)


def test_disjoint_perfect():
    g = gen_disjoint_perfect(3)
    assert list(g.edges) == [(0, 0), (1, 1), (2, 2)]


@pytest.mark.parametrize("fn", [gen_upper_triangular, gen_disjoint_perfect])
def test_size_zero_rejected(fn):
    with pytest.raises(ValueError):
        fn(0)


def test_random_bipartite_is_deterministic_and_valid():
    a = gen_random_bipartite(6, 5, 0.4, seed=3, weight_range=(1, 1e4), capacity_max=3)
    assert a == gen_random_bipartite(6, 5, 0.4, seed=3, weight_range=(1, 1e4), capacity_max=3)
    assert a != gen_random_bipartite(6, 5, 0.4, seed=4, weight_range=(1, 1e4), capacity_max=3)
    assert validate(a) == []
    assert all(1 <= w <= 1e4 for w in a.weights)
    assert all(1 <= c <= 3 for c in a.capacities)


def test_density_extremes():
    assert gen_random_bipartite(4, 5, 0.0, seed=1).n_edges == 0
    assert gen_random_bipartite(4, 5, 1.0, seed=1).n_edges == 20
    with pytest.raises(ValueError):
        gen_random_bipartite(4, 5, 1.5, seed=1)


def test_log_uniform_weights_cover_decades():
    g = gen_random_bipartite(4000, 0, 0.5, seed=0, weight_range=(1, 1e4))
    logs = np.log10(g.weights)
    assert abs(logs.mean() - 2.0) < 0.1
    assert abs(np.mean(logs < 1) - 0.25) < 0.03


@pytest.mark.parametrize("noncrossing", [True, False])
def test_random_fully_online_valid(noncrossing):
    for seed in range(30):
        g = gen_random_fully_online(7, 0.5, seed, noncrossing=noncrossing)
        assert validate(g) == []
        stamps = sorted(list(g.arrival) + list(g.departure))
        assert stamps == list(range(14))


def test_noncrossing_intervals_are_nested_or_disjoint():
    for seed in range(30):
        g = gen_random_fully_online(8, 0.3, seed)
        iv = list(zip(g.arrival, g.departure))
        for a, b in iv:
            for c, d in iv:
                assert not (a < c < b < d)


def test_spec_round_trip():
    spec = GeneratorSpec("random_fully_online", {"n": 5, "p": 0.5, "seed": 9})
    assert GeneratorSpec.from_dict(spec.to_dict()) == spec
    assert spec.build() == gen_random_fully_online(5, 0.5, 9)
    with pytest.raises(ValueError):
        generate(GeneratorSpec("nope"))

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from onlinerank.generators import gen_upper_triangular
from onlinerank.graph_core import (BipartiteInstance, FullyOnlineInstance, expand_capacities,
                                   induce_on_matched_sellers, is_matching, remove_vertex, validate)

from conftest import bipartite_instances, fully_online_instances


def test_single_edge_is_valid(single_edge):
    assert validate(single_edge) == []


def test_arrival_order_must_be_bijection():
    g = BipartiteInstance(1, 2, ((0,), (0,)), (0, 0))
    assert any("arrival_order not a bijection" in v for v in validate(g))


def test_fully_online_timestamps_must_be_distinct():
    g = FullyOnlineInstance.from_intervals([(3, 5), (1, 3)], [])
    assert any("timestamps not distinct" in v for v in validate(g))


@pytest.mark.parametrize("g, fragment", [
    (BipartiteInstance(2, 1, ((1, 1),), (0,)), "duplicate"),
    (BipartiteInstance(2, 1, ((0, 2),), (0,)), "out of range"),
    (BipartiteInstance(2, 1, ((0,),), (0,), weights=(1.0, 0.0)), "not strictly positive"),
    (BipartiteInstance(2, 1, ((0,),), (0,), capacities=(1, 0)), "capacity"),
    (FullyOnlineInstance.from_intervals([(2, 1), (3, 4)], []), "not before"),
    (FullyOnlineInstance((2), (Fraction(0), Fraction(1)), (Fraction(2), Fraction(3)), ((1, 1),)),
     "self-loop"),
])
def test_violations_are_reported(g, fragment):
    assert any(fragment in v for v in validate(g))


def test_remove_only_seller(single_edge):
    g = remove_vertex(single_edge, 0)
    assert g.live_sellers == []
    assert g.adjacency == ((),)
    assert validate(g) == []


def test_remove_seller_from_upper_triangular():
    g = remove_vertex(gen_upper_triangular(3), 1)
    assert g.adjacency == ((0, 2), (2,), (2,))
    assert g.n_sellers == 3  # tombstoned, not reindexed


def test_remove_out_of_range(single_edge):
    with pytest.raises(IndexError):
        remove_vertex(single_edge, 1)


def test_remove_fully_online_vertex(triangle_together):
    g = remove_vertex(triangle_together, 0)
    assert g.edges == ((1, 2),)
    assert g.removed == {0}
    assert validate(g) == []


@given(bipartite_instances(weighted=True, capacities=True), st.data())
def test_remove_then_validate_bipartite(g, data):
    j = data.draw(st.integers(0, g.n_sellers - 1))
    before = (g.adjacency, g.weights, g.capacities, g.arrival_order)
    h = remove_vertex(g, j)
    assert validate(h) == []
    assert (g.adjacency, g.weights, g.capacities, g.arrival_order) == before
    assert h.weights == g.weights and h.capacities == g.capacities
    assert h.arrival_order == g.arrival_order


@given(fully_online_instances(), st.data())
def test_remove_then_validate_fully_online(g, data):
    v = data.draw(st.integers(0, g.n_vertices - 1))
    edges = g.edges
    h = remove_vertex(g, v)
    assert validate(h) == []
    assert g.edges == edges
    assert all(v not in e for e in h.edges)


def test_induce_on_matched_sellers_keeps_covered():
    g = BipartiteInstance(3, 3, ((0, 1), (1, 2), (2,)), (0, 1, 2))
    h = induce_on_matched_sellers(g, {(0, 0), (2, 1)})
    assert h.live_sellers == [0, 2]
    assert h.adjacency == ((0,), (2,), (2,))


def test_induce_on_full_matching_is_identity():
    g = gen_upper_triangular(3)
    h = induce_on_matched_sellers(g, {(0, 0), (1, 1), (2, 2)})
    assert h == g


def test_induce_rejects_non_matching():
    g = gen_upper_triangular(2)
    with pytest.raises(ValueError):
        induce_on_matched_sellers(g, {(0, 1)})  # seller 0 not adjacent to buyer 1


def test_expand_single_seller():
    g = BipartiteInstance(1, 1, ((0,),), (0,), capacities=(3,))
    h, m = expand_capacities(g)
    assert h.n_sellers == 3 and h.adjacency == ((0, 1, 2),)
    assert m == [0, 0, 0]


def test_expand_unit_capacities_is_identity():
    g = BipartiteInstance(2, 2, ((0, 1), (1,)), (1, 0), weights=(2.0, 3.0), capacities=(1, 1))
    h, m = expand_capacities(g)
    assert h == g and m == [0, 1]


def test_expand_weights():
    g = BipartiteInstance(2, 1, ((0, 1),), (0,), weights=(2.0, 5.0), capacities=(2, 1))
    h, _ = expand_capacities(g)
    assert h.weights == (2.0, 2.0, 5.0)


def test_expand_requires_capacities(single_edge):
    with pytest.raises(ValueError):
        expand_capacities(single_edge)


def _all_matchings(g):
    edges = [(s, b) for b, s in g.edges]
    for r in range(len(edges) + 1):
        for sub in combinations(edges, r):
            if is_matching(g, sub):
                yield frozenset(sub)


@given(bipartite_instances(max_side=3, capacities=True))
def test_expand_preserves_feasible_matchings(g):
    h, index_map = expand_capacities(g)
    if h.n_sellers > 6:
        return
    original = set(_all_matchings(g))
    projected = set()
    for m in _all_matchings(h):
        projected.add(frozenset((index_map[s], b) for s, b in m))
    assert projected == original

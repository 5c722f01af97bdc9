"""Instance data model, validation and instance surgery.

Sellers (bipartite) and vertices (fully online) are dense 0-based indices.
Removing a vertex never reindexes: the vertex is tombstoned and its edges are
dropped, so a rank vector drawn for the original instance still lines up with
every derived instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

# (seller, buyer) for bipartite runs; (chosen vertex, departing vertex) for
# fully online runs.
Pair = tuple[int, int]
Matching = frozenset


@dataclass(frozen=True)
class BipartiteInstance:
    """Offline sellers, online buyers and the buyers' neighbourhoods.

    ``adjacency[i]`` is the sorted tuple of sellers adjacent to buyer ``i``.
    Instances are not validated on construction; call :func:`validate`.
    """

    n_sellers: int
    n_buyers: int
    adjacency: tuple[tuple[int, ...], ...]
    arrival_order: tuple[int, ...]
    weights: Optional[tuple[float, ...]] = None
    capacities: Optional[tuple[int, ...]] = None
    removed: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_edges(cls, n_sellers, n_buyers, edges, arrival_order=None,
                   weights=None, capacities=None) -> "BipartiteInstance":
        """Build from ``(buyer, seller)`` pairs, the file format's orientation."""
        adj: list[set] = [set() for _ in range(n_buyers)]
        for b, s in edges:
            adj[b].add(s)
        return cls(
            n_sellers=n_sellers,
            n_buyers=n_buyers,
            adjacency=tuple(tuple(sorted(a)) for a in adj),
            arrival_order=tuple(range(n_buyers)) if arrival_order is None else tuple(arrival_order),
            weights=None if weights is None else tuple(float(w) for w in weights),
            capacities=None if capacities is None else tuple(int(c) for c in capacities),
        )

    @property
    def edges(self) -> list[Pair]:
        """All edges as ``(buyer, seller)`` pairs, buyer-major."""
        return [(b, s) for b, nb in enumerate(self.adjacency) for s in nb]

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency)

    @property
    def live_sellers(self) -> list[int]:
        return [j for j in range(self.n_sellers) if j not in self.removed]

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def weight(self, j: int) -> float:
        return 1.0 if self.weights is None else self.weights[j]

    def capacity(self, j: int) -> int:
        return 1 if self.capacities is None else self.capacities[j]

    @cached_property
    def seller_neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n_sellers)]
        for b, nb in enumerate(self.adjacency):
            for s in nb:
                if 0 <= s < self.n_sellers:
                    nbrs[s].append(b)
        return tuple(tuple(n) for n in nbrs)


@dataclass(frozen=True)
class FullyOnlineInstance:
    """General graph whose vertices arrive and depart at exact rational times.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``.
    """

    n_vertices: int
    arrival: tuple[Fraction, ...]
    departure: tuple[Fraction, ...]
    edges: tuple[Pair, ...]
    removed: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_intervals(cls, intervals: Sequence[tuple], edges) -> "FullyOnlineInstance":
        """``intervals[v] = (arrive, depart)``; endpoints may be ints or Fractions."""
        norm = sorted({(min(u, v), max(u, v)) for u, v in edges})
        return cls(
            n_vertices=len(intervals),
            arrival=tuple(Fraction(a) for a, _ in intervals),
            departure=tuple(Fraction(d) for _, d in intervals),
            edges=tuple(norm),
        )

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            if 0 <= u < self.n_vertices and 0 <= v < self.n_vertices:
                adj[u].append(v)
                adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def live_vertices(self) -> list[int]:
        return [v for v in range(self.n_vertices) if v not in self.removed]

    def overlaps(self, u: int, v: int) -> bool:
        """Whether the half-open presence intervals of ``u`` and ``v`` intersect."""
        return self.arrival[u] < self.departure[v] and self.arrival[v] < self.departure[u]

    @cached_property
    def feasible_edges(self) -> tuple[Pair, ...]:
        """Live edges whose endpoints are ever on the platform together."""
        return tuple((u, v) for u, v in self.edges
                     if u not in self.removed and v not in self.removed and self.overlaps(u, v))

    def events(self) -> list[tuple[Fraction, int, str]]:
        """Arrival and departure events of live vertices in time order."""
        evs = []
        for v in self.live_vertices:
            evs.append((self.arrival[v], v, "arrive"))
            evs.append((self.departure[v], v, "depart"))
        evs.sort(key=lambda e: e[0])
        return evs


Instance = Union[BipartiteInstance, FullyOnlineInstance]


def validate(instance: Instance) -> list[str]:
    """Return every invariant violation as a message; empty means valid."""
    if isinstance(instance, BipartiteInstance):
        return _validate_bipartite(instance)
    if isinstance(instance, FullyOnlineInstance):
        return _validate_fully_online(instance)
    return [f"unknown instance type {type(instance).__name__}"]


def _validate_bipartite(g: BipartiteInstance) -> list[str]:
    out = []
    if g.n_sellers < 0 or g.n_buyers < 0:
        out.append("negative vertex count")
    if len(g.adjacency) != g.n_buyers:
        out.append(f"adjacency has {len(g.adjacency)} rows for {g.n_buyers} buyers")
    for b, nb in enumerate(g.adjacency):
        if len(set(nb)) != len(nb):
            out.append(f"buyer {b}: duplicate sellers in adjacency")
        if list(nb) != sorted(nb):
            out.append(f"buyer {b}: adjacency not sorted")
        bad = [s for s in nb if not 0 <= s < g.n_sellers]
        if bad:
            out.append(f"buyer {b}: seller index out of range {bad}")
        dead = [s for s in nb if s in g.removed]
        if dead:
            out.append(f"buyer {b}: adjacent to removed sellers {dead}")
    if sorted(g.arrival_order) != list(range(g.n_buyers)):
        out.append("arrival_order not a bijection on buyers")
    if g.weights is not None:
        if len(g.weights) != g.n_sellers:
            out.append(f"weights has length {len(g.weights)} for {g.n_sellers} sellers")
        for j, w in enumerate(g.weights):
            if not w > 0:
                out.append(f"seller {j}: weight {w} not strictly positive")
    if g.capacities is not None:
        if len(g.capacities) != g.n_sellers:
            out.append(f"capacities has length {len(g.capacities)} for {g.n_sellers} sellers")
        for j, c in enumerate(g.capacities):
            if int(c) != c or c < 1:
                out.append(f"seller {j}: capacity {c} not a positive integer")
    if any(not 0 <= j < g.n_sellers for j in g.removed):
        out.append("removed set contains out-of-range sellers")
    return out


def _validate_fully_online(g: FullyOnlineInstance) -> list[str]:
    out = []
    n = g.n_vertices
    if len(g.arrival) != n or len(g.departure) != n:
        out.append("timestamp vectors do not match vertex count")
        return out
    for v in range(n):
        if not g.arrival[v] < g.departure[v]:
            out.append(f"vertex {v}: arrival {g.arrival[v]} not before departure {g.departure[v]}")
    stamps = list(g.arrival) + list(g.departure)
    if len(set(stamps)) != len(stamps):
        seen, dup = set(), set()
        for t in stamps:
            (dup if t in seen else seen).add(t)
        out.append(f"timestamps not distinct: {sorted(dup)}")
    seen_edges = set()
    for u, v in g.edges:
        if not (0 <= u < n and 0 <= v < n):
            out.append(f"edge ({u}, {v}) out of range")
            continue
        if u == v:
            out.append(f"self-loop at vertex {u}")
        if u > v:
            out.append(f"edge ({u}, {v}) not stored as (min, max)")
        key = (min(u, v), max(u, v))
        if key in seen_edges:
            out.append(f"duplicate edge {key}")
        seen_edges.add(key)
        if u in g.removed or v in g.removed:
            out.append(f"edge ({u}, {v}) touches a removed vertex")
    return out


def remove_vertex(instance: Instance, v: int) -> Instance:
    """Delete seller/vertex ``v`` and its edges, keeping every index in place."""
    if isinstance(instance, BipartiteInstance):
        if not 0 <= v < instance.n_sellers:
            raise IndexError(f"seller {v} out of range 0..{instance.n_sellers - 1}")
        adj = tuple(tuple(s for s in nb if s != v) for nb in instance.adjacency)
        return replace(instance, adjacency=adj, removed=instance.removed | {v})
    if not 0 <= v < instance.n_vertices:
        raise IndexError(f"vertex {v} out of range 0..{instance.n_vertices - 1}")
    edges = tuple(e for e in instance.edges if v not in e)
    return replace(instance, edges=edges, removed=instance.removed | {v})


def is_matching(instance: Instance, pairs) -> bool:
    """Check ``pairs`` is a (capacity-respecting) matching of ``instance``."""
    if isinstance(instance, BipartiteInstance):
        used_s: dict[int, int] = {}
        used_b = set()
        for s, b in pairs:
            if not 0 <= b < instance.n_buyers or s not in instance.adjacency[b]:
                return False
            if b in used_b:
                return False
            used_b.add(b)
            used_s[s] = used_s.get(s, 0) + 1
            if used_s[s] > instance.capacity(s):
                return False
        return True
    edge_set = set(instance.edges)
    used = set()
    for a, b in pairs:
        if (min(a, b), max(a, b)) not in edge_set or a in used or b in used or a == b:
            return False
        used.update((a, b))
    return True


def induce_on_matched_sellers(instance: BipartiteInstance, m) -> BipartiteInstance:
    """Keep only the sellers covered by ``m`` (all buyers stay)."""
    if not is_matching(instance, m):
        raise ValueError("not a matching in this instance")
    covered = {s for s, _ in m}
    g = instance
    for j in instance.live_sellers:
        if j not in covered:
            g = remove_vertex(g, j)
    return g


def expand_capacities(instance: BipartiteInstance) -> tuple[BipartiteInstance, list[int]]:
    """Replace each live seller ``j`` by ``c_j`` unit-capacity copies.

    Copies of one seller are consecutive and inherit its weight and
    neighbourhood. Returns the expanded instance and ``index_map`` with
    ``index_map[copy] = original seller``.
    """
    if instance.capacities is None:
        raise ValueError("instance has no capacities")
    index_map: list[int] = []
    first_copy: dict[int, int] = {}
    for j in instance.live_sellers:
        first_copy[j] = len(index_map)
        index_map.extend([j] * instance.capacities[j])
    adj = []
    for nb in instance.adjacency:
        row = []
        for s in nb:
            row.extend(range(first_copy[s], first_copy[s] + instance.capacities[s]))
        adj.append(tuple(row))
    weights = None
    if instance.weights is not None:
        weights = tuple(instance.weights[j] for j in index_map)
    expanded = BipartiteInstance(
        n_sellers=len(index_map),
        n_buyers=instance.n_buyers,
        adjacency=tuple(adj),
        arrival_order=instance.arrival_order,
        weights=weights,
        capacities=tuple([1] * len(index_map)),
    )
    return expanded, index_map

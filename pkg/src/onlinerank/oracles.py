"""Exact offline optima used as competitive-ratio denominators and test ground truth."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .graph_core import BipartiteInstance, FullyOnlineInstance, expand_capacities

BRUTE_FORCE_EDGE_CAP = 24


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    matching: frozenset
    objective: float


def _augment(s_start, seller_nbrs, buyer_of_seller, seller_of_buyer, seen) -> bool:
    # Kuhn's DFS from a seller; iterative to keep deep instances off the C stack.
    stack = [(s_start, iter(seller_nbrs[s_start]))]
    path = []
    while stack:
        s, it = stack[-1]
        advanced = False
        for b in it:
            if b in seen:
                continue
            seen.add(b)
            owner = seller_of_buyer.get(b)
            path.append((s, b))
            if owner is None:
                for ps, pb in path:
                    seller_of_buyer[pb] = ps
                    buyer_of_seller[ps] = pb
                return True
            stack.append((owner, iter(seller_nbrs[owner])))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if path:
                path.pop()
    return False


def _seller_neighbors(g: BipartiteInstance):
    return [list(nb) if j not in g.removed else [] for j, nb in enumerate(g.seller_neighbors)]


def max_matching_bipartite(instance: BipartiteInstance) -> OracleResult:
    """Maximum-cardinality matching by repeated augmenting paths.

    Capacities, when present, are honoured by working on the expanded instance.
    """
    if instance.capacities is not None and any(c != 1 for c in instance.capacities):
        expanded, index_map = expand_capacities(instance)
        res = max_matching_bipartite(expanded)
        pairs = frozenset((index_map[s], b) for s, b in res.matching)
        return OracleResult(pairs, res.objective)
    nbrs = _seller_neighbors(instance)
    buyer_of_seller: dict[int, int] = {}
    seller_of_buyer: dict[int, int] = {}
    for j in instance.live_sellers:
        _augment(j, nbrs, buyer_of_seller, seller_of_buyer, set())
    m = frozenset(buyer_of_seller.items())
    return OracleResult(m, len(m))


def max_weight_seller_matching(instance: BipartiteInstance) -> OracleResult:
    """Maximum total seller weight via the transversal-matroid greedy.

    Sellers are offered heaviest first (ties: lower index) and kept iff an
    augmenting path from them exists given the sellers already kept.
    """
    if instance.weights is None:
        raise ValueError("instance has no weights")
    nbrs = _seller_neighbors(instance)
    order = sorted(instance.live_sellers, key=lambda j: (-instance.weights[j], j))
    buyer_of_seller: dict[int, int] = {}
    seller_of_buyer: dict[int, int] = {}
    for j in order:
        _augment(j, nbrs, buyer_of_seller, seller_of_buyer, set())
    m = frozenset(buyer_of_seller.items())
    return OracleResult(m, sum(instance.weights[s] for s, _ in m))


def brute_force_max_matching(instance: BipartiteInstance,
                             cap: int = BRUTE_FORCE_EDGE_CAP) -> OracleResult:
    """Exhaustive search over every matching (edge subsets without conflicts)."""
    edges = [(s, b) for b, s in instance.edges]
    if len(edges) > cap:
        raise OracleTooLarge(f"{len(edges)} edges exceeds brute-force cap {cap}")
    best: list = [frozenset()]

    def rec(k, used_s, used_b, chosen):
        if len(chosen) > len(best[0]):
            best[0] = frozenset(chosen)
        if len(chosen) + (len(edges) - k) <= len(best[0]):
            return
        for idx in range(k, len(edges)):
            s, b = edges[idx]
            if s in used_s or b in used_b:
                continue
            chosen.append((s, b))
            rec(idx + 1, used_s | {s}, used_b | {b}, chosen)
            chosen.pop()

    rec(0, frozenset(), frozenset(), [])
    return OracleResult(best[0], len(best[0]))


def _hall_ok(subset, nbrs) -> bool:
    for r in range(1, len(subset) + 1):
        for xs in combinations(subset, r):
            if len(set().union(*(nbrs[j] for j in xs))) < r:
                return False
    return True


def brute_force_max_weight(instance: BipartiteInstance, max_sellers: int = 10) -> float:
    """Best total weight over all seller subsets that pass Hall's condition."""
    if instance.weights is None:
        raise ValueError("instance has no weights")
    live = instance.live_sellers
    if len(live) > max_sellers:
        raise OracleTooLarge(f"{len(live)} sellers exceeds cap {max_sellers}")
    nbrs = {j: set(instance.seller_neighbors[j]) for j in live}
    best = 0.0
    for r in range(len(live) + 1):
        for subset in combinations(live, r):
            w = sum(instance.weights[j] for j in subset)
            if w > best and _hall_ok(subset, nbrs):
                best = w
    return best


def max_matching_general(instance: FullyOnlineInstance,
                         cap: int = BRUTE_FORCE_EDGE_CAP) -> OracleResult:
    """Maximum matching over temporally feasible edges by branch and bound.

    Branches on the lowest-index vertex that still has an edge: either it stays
    unmatched or it takes one of its remaining neighbours.
    """
    edges = instance.feasible_edges
    if len(edges) > cap:
        raise OracleTooLarge(f"{len(edges)} feasible edges exceeds cap {cap}")
    adj: dict[int, set] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    best: list = [frozenset()]

    def rec(alive: frozenset, chosen: list):
        if len(chosen) > len(best[0]):
            best[0] = frozenset(chosen)
        active = sorted(v for v in alive if adj[v] & alive)
        if len(chosen) + len(active) // 2 <= len(best[0]):
            return
        if not active:
            return
        v = active[0]
        for u in sorted(adj[v] & alive):
            chosen.append((min(u, v), max(u, v)))
            rec(alive - {u, v}, chosen)
            chosen.pop()
        rec(alive - {v}, chosen)

    rec(frozenset(adj), [])
    return OracleResult(best[0], len(best[0]))


def brute_force_general(instance: FullyOnlineInstance, cap: int = 16) -> int:
    """Enumerate every subset of feasible edges and keep the largest matching."""
    edges = instance.feasible_edges
    if len(edges) > cap:
        raise OracleTooLarge(f"{len(edges)} feasible edges exceeds cap {cap}")
    best = 0
    for mask in range(1 << len(edges)):
        used = set()
        size = 0
        ok = True
        for k, (u, v) in enumerate(edges):
            if mask >> k & 1:
                if u in used or v in used:
                    ok = False
                    break
                used.update((u, v))
                size += 1
        if ok and size > best:
            best = size
    return best

"""Instance families: adversarial, random, calibration and the two-seller weight pathology."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .graph_core import BipartiteInstance, FullyOnlineInstance, validate

FAMILIES = ("upper_triangular", "random_bipartite", "figure1", "random_fully_online",
            "disjoint_perfect")

FIGURE1_LIGHT = 1.0
FIGURE1_HEAVY = 1e10


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        return cls(d["family"], dict(d.get("params", {})))

    def build(self):
        return generate(self)


def gen_upper_triangular(n: int) -> BipartiteInstance:
    """Buyer ``i`` sees sellers ``i..n-1``; buyers arrive in index order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    adj = tuple(tuple(range(i, n)) for i in range(n))
    return BipartiteInstance(n, n, adj, tuple(range(n)))


def gen_disjoint_perfect(n: int) -> BipartiteInstance:
    if n < 1:
        raise ValueError("n must be >= 1")
    return BipartiteInstance(n, n, tuple((i,) for i in range(n)), tuple(range(n)))


def gen_figure1() -> BipartiteInstance:
    """Sellers ``j`` (weight 1) and ``j'`` (weight 1e10) sharing a single buyer."""
    return BipartiteInstance(2, 1, ((0, 1),), (0,), weights=(FIGURE1_LIGHT, FIGURE1_HEAVY))


def gen_random_bipartite(n_s: int, n_b: int, p: float, seed: int,
                         weight_range: Optional[tuple[float, float]] = None,
                         capacity_max: Optional[int] = None) -> BipartiteInstance:
    """Erdos-Renyi bipartite graph with a random arrival order.

    Weights, when requested, are log-uniform on ``weight_range``; capacities,
    when requested, are uniform on ``1..capacity_max``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n_s < 0 or n_b < 0:
        raise ValueError("sizes must be non-negative")
    rng = np.random.default_rng(seed)
    mask = rng.random((n_b, n_s)) < p
    adj = tuple(tuple(int(s) for s in np.flatnonzero(row)) for row in mask)
    order = tuple(int(b) for b in rng.permutation(n_b))
    weights = None
    if weight_range is not None:
        lo, hi = weight_range
        if not 0 < lo <= hi:
            raise ValueError("weight range must satisfy 0 < lo <= hi")
        weights = tuple(float(w) for w in np.exp(rng.uniform(np.log(lo), np.log(hi), n_s)))
    capacities = None
    if capacity_max is not None:
        capacities = tuple(int(c) for c in rng.integers(1, capacity_max + 1, n_s))
    return BipartiteInstance(n_s, n_b, adj, order, weights, capacities)


def _random_noncrossing_pairing(n: int, rng) -> list[tuple[int, int]]:
    # uniform random well-formed bracket word, rejection-sampled, then matched
    while True:
        word = rng.permutation([1] * n + [-1] * n)
        if np.all(np.cumsum(word) >= 0):
            break
    stack, pairs = [], []
    for pos, c in enumerate(word):
        if c == 1:
            stack.append(pos)
        else:
            pairs.append((stack.pop(), pos))
    return sorted(pairs)


def gen_random_fully_online(n: int, p: float, seed: int,
                            noncrossing: bool = True) -> FullyOnlineInstance:
    """Random arrival/departure interleaving of ``n`` vertices with G(n, p) edges.

    Timestamps are the distinct integers ``0..2n-1``. Each vertex gets an
    (earlier, later) pair of them, so intervals are never empty. By default
    the pairing is a random non-crossing one (any two intervals are nested or
    disjoint); ``noncrossing=False`` pairs the 2n slots uniformly at random,
    which also produces partially overlapping intervals.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    if noncrossing:
        slots = _random_noncrossing_pairing(n, rng)
    else:
        perm = rng.permutation(2 * n)
        slots = [tuple(sorted((int(perm[2 * v]), int(perm[2 * v + 1])))) for v in range(n)]
    order = rng.permutation(n)
    intervals = [None] * n
    for v, k in enumerate(order):
        intervals[v] = slots[int(k)]
    mask = rng.random((n, n)) < p
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if mask[u, v]]
    g = FullyOnlineInstance.from_intervals(intervals, edges)
    problems = validate(g)
    assert not problems, problems
    return g


def generate(spec: GeneratorSpec):
    p = spec.params
    if spec.family == "upper_triangular":
        return gen_upper_triangular(int(p["n"]))
    if spec.family == "disjoint_perfect":
        return gen_disjoint_perfect(int(p["n"]))
    if spec.family == "figure1":
        return gen_figure1()
    if spec.family == "random_bipartite":
        wr = p.get("weight_range")
        return gen_random_bipartite(int(p["n_s"]), int(p["n_b"]), float(p["p"]), int(p["seed"]),
                                    None if wr is None else tuple(wr), p.get("capacity_max"))
    if spec.family == "random_fully_online":
        return gen_random_fully_online(int(p["n"]), float(p["p"]), int(p["seed"]),
                                       bool(p.get("noncrossing", True)))
    raise ValueError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")

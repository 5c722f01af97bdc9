"""Deterministic Ranking-family engines.

Every engine is a pure function of an instance and a rank vector (or a
seller permutation); randomness is drawn elsewhere. Ties between equal keys
always go to the lower seller/vertex index.

Two execution paths exist. ``run_*`` functions replay one run and keep full
accounting; :func:`batch_choices` replays many rank vectors at once with numpy
for Monte Carlo use. Both compute selection keys through :func:`selection_keys`
so they agree bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph_core import BipartiteInstance, FullyOnlineInstance, Instance

ENGINES = ("ranking", "fully_online", "vertex_weighted", "eps_ranking", "single_valued")
WEIGHTED_ENGINES = ("vertex_weighted", "eps_ranking", "single_valued")


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one run.

    ``revenue`` is indexed by seller (vertex, fully online) and ``utility`` by
    buyer (vertex). Each matched pair splits its weight into a price
    ``w_j * exp(x_j - 1 - eps)`` credited to the seller and the remainder
    credited to the buyer, so the two sum to the objective. Unweighted engines
    use unit weights and ``eps = 0``; the permutation engine, which has no
    ranks, credits the whole unit to the seller.

    ``trace`` lists ``(buyer, chosen seller or None)`` per decision in order;
    for fully online runs ``times`` gives the departure time of each decision.
    """

    matching: frozenset
    objective: float
    revenue: tuple
    utility: tuple
    trace: tuple
    times: Optional[tuple] = None

    @property
    def size(self) -> int:
        return len(self.matching)


def _check_ranks(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != dim:
        raise EngineError(f"rank vector has dimension {x.shape[-1]}, expected {dim}")
    if np.any(x < 0.0) or np.any(x >= 1.0) or np.any(np.isnan(x)):
        raise EngineError("ranks must lie in [0, 1)")
    return x


def _weights_array(instance: BipartiteInstance) -> np.ndarray:
    return np.asarray(instance.weights, dtype=np.float64)


def selection_keys(instance: Instance, engine: str, x: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Per-seller keys to *minimise*; works on 1-D or 2-D (trials x sellers) ranks."""
    if engine in ("ranking", "fully_online"):
        return x
    w = _weights_array(instance)
    return -(w * (1.0 - np.exp(x - 1.0 - eps)))


def prices(instance: BipartiteInstance, x: np.ndarray, eps: float = 0.0) -> np.ndarray:
    w = np.ones(x.shape[-1]) if instance.weights is None else _weights_array(instance)
    return w * np.exp(x - 1.0 - eps)


def _require_bipartite(instance, engine):
    if not isinstance(instance, BipartiteInstance):
        raise EngineError(f"engine {engine!r} needs a bipartite instance")


def _require_weights(instance, engine):
    _require_bipartite(instance, engine)
    if instance.weights is None:
        raise EngineError(f"engine {engine!r} needs seller weights")


def _greedy_bipartite(instance: BipartiteInstance, keys: list, caps: list,
                      price: list, weights: list) -> RunRecord:
    n_s, n_b = instance.n_sellers, instance.n_buyers
    left = list(caps)
    revenue = [0.0] * n_s
    utility = [0.0] * n_b
    pairs = []
    trace = []
    objective = 0.0
    for b in instance.arrival_order:
        best = None
        for s in instance.adjacency[b]:
            if left[s] > 0 and (best is None or keys[s] < keys[best]):
                best = s
        trace.append((b, best))
        if best is None:
            continue
        left[best] -= 1
        pairs.append((best, b))
        revenue[best] += price[best]
        utility[b] = weights[best] - price[best]
        objective += weights[best]
    return RunRecord(frozenset(pairs), objective, tuple(revenue), tuple(utility), tuple(trace))


def run_ranking_permutation(instance: BipartiteInstance, perm: Sequence[int]) -> RunRecord:
    """Each arriving buyer takes its unmatched neighbour that comes first in ``perm``."""
    _require_bipartite(instance, "ranking")
    perm = list(perm)
    if sorted(perm) != list(range(instance.n_sellers)):
        raise EngineError("perm is not a permutation of the sellers")
    position = [0] * instance.n_sellers
    for pos, s in enumerate(perm):
        position[s] = pos
    n = instance.n_sellers
    rec = _greedy_bipartite(instance, position, [1] * n, [1.0] * n, [1.0] * n)
    return RunRecord(rec.matching, len(rec.matching), rec.revenue, rec.utility, rec.trace)


def run_ranking(instance: BipartiteInstance, x) -> RunRecord:
    """Each arriving buyer takes its unmatched neighbour of smallest rank."""
    _require_bipartite(instance, "ranking")
    x = _check_ranks(x, instance.n_sellers)
    n = instance.n_sellers
    rec = _greedy_bipartite(instance, x.tolist(), [1] * n, np.exp(x - 1.0).tolist(), [1.0] * n)
    return RunRecord(rec.matching, len(rec.matching), rec.revenue, rec.utility, rec.trace)


def run_eps_ranking(instance: BipartiteInstance, x, eps: float = 0.0) -> RunRecord:
    """Arriving buyer takes the unmatched neighbour maximising ``w_j (1 - exp(x_j - 1 - eps))``.

    ``eps = 0`` is plain vertex-weighted Ranking.
    """
    _require_weights(instance, "eps_ranking")
    if eps < 0:
        raise EngineError("eps must be non-negative")
    x = _check_ranks(x, instance.n_sellers)
    keys = selection_keys(instance, "eps_ranking", x, eps)
    n = instance.n_sellers
    return _greedy_bipartite(instance, keys.tolist(), [1] * n,
                             prices(instance, x, eps).tolist(), list(instance.weights))


def run_single_valued_ranking(instance: BipartiteInstance, x) -> RunRecord:
    """Vertex-weighted Ranking where seller ``j`` stays available for ``c_j`` matches.

    The same rank ``x_j`` is reused for every match of ``j``.
    """
    _require_weights(instance, "single_valued")
    if instance.capacities is None:
        raise EngineError("engine 'single_valued' needs seller capacities")
    x = _check_ranks(x, instance.n_sellers)
    keys = selection_keys(instance, "single_valued", x, 0.0)
    return _greedy_bipartite(instance, keys.tolist(), list(instance.capacities),
                             prices(instance, x).tolist(), list(instance.weights))


def _departure_plan(instance: FullyOnlineInstance):
    """For each live departure in time order: (time, vertex, present neighbours)."""
    present = set()
    plan = []
    for t, v, what in instance.events():
        if what == "arrive":
            present.add(v)
        else:
            present.discard(v)
            plan.append((t, v, tuple(u for u in instance.adjacency[v] if u in present)))
    return plan


def run_fully_online_ranking(instance: FullyOnlineInstance, x) -> RunRecord:
    """At each departure of an unmatched vertex, match it to the present
    unmatched neighbour of smallest rank.

    Vertices that already departed are gone for good, matched or not.
    """
    if not isinstance(instance, FullyOnlineInstance):
        raise EngineError("engine 'fully_online' needs a fully online instance")
    x = _check_ranks(x, instance.n_vertices)
    keys = x.tolist()
    price = np.exp(x - 1.0).tolist()
    n = instance.n_vertices
    matched = [False] * n
    revenue = [0.0] * n
    utility = [0.0] * n
    pairs, trace, times = [], [], []
    for t, i, cands in _departure_plan(instance):
        if matched[i]:
            continue
        best = None
        for j in cands:
            if not matched[j] and (best is None or keys[j] < keys[best]):
                best = j
        trace.append((i, best))
        times.append(t)
        if best is None:
            continue
        matched[i] = matched[best] = True
        pairs.append((best, i))
        revenue[best] = price[best]
        utility[i] = 1.0 - price[best]
    return RunRecord(frozenset(pairs), len(pairs), tuple(revenue), tuple(utility),
                     tuple(trace), tuple(times))


def accounting_error(record: RunRecord) -> float:
    """``|sum(r) + sum(u) - objective|`` relative to the objective (absolute if it is 0)."""
    gap = abs(math.fsum(record.revenue) + math.fsum(record.utility) - record.objective)
    return gap / record.objective if record.objective else gap


def run_engine(instance: Instance, engine: str, x, eps: Optional[float] = None) -> RunRecord:
    """Dispatch by engine name."""
    if engine == "ranking":
        return run_ranking(instance, x)
    if engine == "fully_online":
        return run_fully_online_ranking(instance, x)
    if engine == "vertex_weighted":
        return run_eps_ranking(instance, x, 0.0)
    if engine == "eps_ranking":
        if eps is None:
            raise EngineError("engine 'eps_ranking' needs eps")
        return run_eps_ranking(instance, x, eps)
    if engine == "single_valued":
        return run_single_valued_ranking(instance, x)
    raise EngineError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")


def rank_dimension(instance: Instance) -> int:
    if isinstance(instance, BipartiteInstance):
        return instance.n_sellers
    return instance.n_vertices


def check_compatible(instance: Instance, engine: str, eps: Optional[float] = None) -> None:
    if engine not in ENGINES:
        raise EngineError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    if engine == "fully_online":
        if not isinstance(instance, FullyOnlineInstance):
            raise EngineError("engine 'fully_online' needs a fully online instance")
        return
    _require_bipartite(instance, engine)
    if engine in WEIGHTED_ENGINES:
        _require_weights(instance, engine)
    if engine == "single_valued" and instance.capacities is None:
        raise EngineError("engine 'single_valued' needs seller capacities")
    if engine == "eps_ranking" and (eps is None or eps < 0):
        raise EngineError("engine 'eps_ranking' needs eps >= 0")


def batch_choices(instance: Instance, engine: str, ranks: np.ndarray,
                  eps: Optional[float] = None) -> np.ndarray:
    """Replay many runs at once.

    ``ranks`` has shape ``(trials, dim)``. Returns an int array of shape
    ``(trials, n_buyers)`` (``n_vertices`` when fully online) holding the
    seller/vertex each buyer/departing vertex was matched to on its own
    decision, or -1.
    """
    check_compatible(instance, engine, eps)
    ranks = _check_ranks(ranks, rank_dimension(instance))
    t = ranks.shape[0]
    rows = np.arange(t)
    e = 0.0 if engine != "eps_ranking" else float(eps)
    keys = selection_keys(instance, engine, ranks, e)
    if engine == "fully_online":
        n = instance.n_vertices
        out = np.full((t, n), -1, dtype=np.int64)
        matched = np.zeros((t, n), dtype=bool)
        for _, i, cands in _departure_plan(instance):
            if not cands:
                continue
            nb = np.asarray(cands, dtype=np.int64)
            masked = np.where(matched[:, nb], np.inf, keys[:, nb])
            idx = np.argmin(masked, axis=1)
            ok = ~matched[:, i] & np.isfinite(masked[rows, idx])
            chosen = nb[idx]
            out[ok, i] = chosen[ok]
            matched[ok, i] = True
            matched[rows[ok], chosen[ok]] = True
        return out
    n_s = instance.n_sellers
    left = np.tile(np.asarray(
        instance.capacities if engine == "single_valued" else [1] * n_s, dtype=np.int64), (t, 1))
    out = np.full((t, instance.n_buyers), -1, dtype=np.int64)
    for b in instance.arrival_order:
        nb_list = instance.adjacency[b]
        if not nb_list:
            continue
        nb = np.asarray(nb_list, dtype=np.int64)
        masked = np.where(left[:, nb] > 0, keys[:, nb], np.inf)
        idx = np.argmin(masked, axis=1)
        ok = np.isfinite(masked[rows, idx])
        chosen = nb[idx]
        out[ok, b] = chosen[ok]
        left[rows[ok], chosen[ok]] -= 1
    return out


def batch_objectives(instance: Instance, engine: str, choices: np.ndarray) -> np.ndarray:
    """Objective per trial from :func:`batch_choices` output."""
    matched = choices >= 0
    if engine not in WEIGHTED_ENGINES:
        return matched.sum(axis=1).astype(np.float64)
    # accumulate in arrival order so sums match the scalar engines exactly
    w = np.concatenate([_weights_array(instance), [0.0]])
    total = np.zeros(choices.shape[0])
    for b in instance.arrival_order:
        total += w[choices[:, b]]
    return total

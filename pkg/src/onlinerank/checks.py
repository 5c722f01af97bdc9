"""Exact per-run checks of the structural properties behind the tail bounds.

Suite identifiers:

========== ================ ===============================================
id         engine           property
========== ================ ===============================================
L3         ranking          one-rank perturbation moves |M| by at most 1
L4         ranking          |M_-j| <= |M| <= |M_-j| + 1 after removing j
L5         fully_online     one-rank perturbation moves |M| by at most 1
L6         fully_online     removal sandwich as L4, any vertex j
L7         eps_ranking      perturbation moves w(M) by at most (1 + 2/eps) w_j
L8         eps_ranking      w(M_-j) - (2/eps) w_j <= w(M) <= w(M_-j) + w_j
L8-utility eps_ranking      every buyer's utility is no smaller on G than on G_-j
L9         eps_ranking      E[r_j + u_i] >= (1 - 1/e - eps) w_j (statistical)
========== ================ ===============================================

Cardinality comparisons are exact integers; weighted ones allow
``WEIGHT_SLACK`` absolute error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.stats import norm

from . import seeding
from .engines import accounting_error, batch_choices, prices, run_engine
from .generators import gen_random_bipartite, gen_random_fully_online
from .graph_core import BipartiteInstance, FullyOnlineInstance, Instance, remove_vertex

WEIGHT_SLACK = 1e-9
EXACT_LEMMAS = ("L3", "L4", "L5", "L6", "L7", "L8", "L8-utility")
LEMMAS = EXACT_LEMMAS + ("L9",)
LEMMA_ENGINE = {
    "L3": "ranking", "L4": "ranking", "L5": "fully_online", "L6": "fully_online",
    "L7": "eps_ranking", "L8": "eps_ranking", "L8-utility": "eps_ranking", "L9": "eps_ranking",
}
SUITE_EPS = (0.1, 0.25, 0.5)
SUITE_DENSITIES = (0.2, 0.5, 0.8)
SUITE_MAX_SIDE = 12
SUITE_WEIGHT_RANGE = (1.0, 1e4)


class CheckError(ValueError):
    pass


@dataclass(frozen=True)
class LemmaReport:
    """Result of one check.

    ``f_x`` / ``f_xprime`` are the two compared objectives (for removal checks:
    the run on G and on G_-j). ``bound`` is the allowed increase
    ``f_x - f_xprime`` (removal checks) or allowed ``|f_x - f_xprime|``
    (perturbation checks). ``witness`` keeps everything else.
    """

    lemma_id: str
    engine: str
    holds: bool
    f_x: float
    f_xprime: float
    bound: float
    witness: dict = field(default_factory=dict)


def _weighted(engine: str) -> bool:
    return engine == "eps_ranking"


def _needs_eps(engine: str, eps: Optional[float]) -> float:
    if engine == "eps_ranking":
        if eps is None or not eps > 0:
            raise CheckError("eps_ranking checks need eps > 0")
        return float(eps)
    if eps is not None:
        raise CheckError(f"eps only applies to eps_ranking, not {engine}")
    return 0.0


def check_bounded_difference(instance: Instance, engine: str, x, j_star: int, theta: float,
                             eps: Optional[float] = None) -> LemmaReport:
    """Rerun with rank ``j_star`` replaced by ``theta`` and compare objectives."""
    if engine not in ("ranking", "fully_online", "eps_ranking"):
        raise CheckError(f"no bounded-difference property for engine {engine!r}")
    e = _needs_eps(engine, eps)
    if not 0.0 <= theta < 1.0:
        raise CheckError("theta must lie in [0, 1)")
    x = np.asarray(x, dtype=np.float64)
    if not 0 <= j_star < x.shape[0]:
        raise CheckError(f"j_star {j_star} out of range")
    xp = x.copy()
    xp[j_star] = theta
    run_x = run_engine(instance, engine, x, eps)
    run_xp = run_engine(instance, engine, xp, eps)
    fx, fxp = run_x.objective, run_xp.objective
    if _weighted(engine):
        bound = (1.0 + 2.0 / e) * instance.weights[j_star]
        holds = abs(fx - fxp) <= bound + WEIGHT_SLACK
        lemma = "L7"
    else:
        bound = 1
        holds = abs(fx - fxp) <= 1
        lemma = "L3" if engine == "ranking" else "L5"
    return LemmaReport(lemma, engine, bool(holds), fx, fxp, bound,
                       {"j_star": j_star, "theta": theta, "eps": eps,
                        "accounting_error": max(accounting_error(run_x), accounting_error(run_xp))})


def check_vertex_removal(instance: Instance, engine: str, x, j: int,
                         eps: Optional[float] = None) -> LemmaReport:
    """Compare the run on G with the run on G minus ``j`` under the same ranks."""
    if engine not in ("ranking", "fully_online", "eps_ranking"):
        raise CheckError(f"no removal property for engine {engine!r}")
    e = _needs_eps(engine, eps)
    g_minus = remove_vertex(instance, j)
    run_full = run_engine(instance, engine, x, eps)
    run_minus = run_engine(g_minus, engine, x, eps)
    full, minus = run_full.objective, run_minus.objective
    if _weighted(engine):
        wj = instance.weights[j]
        lower = 2.0 / e * wj
        holds = minus - lower - WEIGHT_SLACK <= full <= minus + wj + WEIGHT_SLACK
        return LemmaReport("L8", engine, bool(holds), full, minus, wj,
                           {"j": j, "eps": eps, "lower_slack": lower,
                            "accounting_error": max(accounting_error(run_full),
                                                    accounting_error(run_minus))})
    holds = minus <= full <= minus + 1
    return LemmaReport("L4" if engine == "ranking" else "L6", engine, bool(holds),
                       full, minus, 1, {"j": j})


def check_utility_monotonicity(instance: BipartiteInstance, x, j: int, eps: float) -> LemmaReport:
    """Every buyer's utility on G is at least its utility on G minus seller ``j``.

    ``f_x`` / ``f_xprime`` report the buyer with the smallest margin.
    """
    _needs_eps("eps_ranking", eps)
    full = run_engine(instance, "eps_ranking", x, eps)
    minus = run_engine(remove_vertex(instance, j), "eps_ranking", x, eps)
    margins = [a - b for a, b in zip(full.utility, minus.utility)]
    worst = min(range(len(margins)), key=margins.__getitem__) if margins else None
    holds = all(m >= -WEIGHT_SLACK for m in margins)
    fx = full.utility[worst] if worst is not None else 0.0
    fxp = minus.utility[worst] if worst is not None else 0.0
    return LemmaReport("L8-utility", "eps_ranking", bool(holds), fx, fxp, WEIGHT_SLACK,
                       {"j": j, "eps": eps, "worst_buyer": worst,
                        "accounting_error": max(accounting_error(full), accounting_error(minus))})


@dataclass(frozen=True)
class EdgeBoundEstimate:
    """Monte Carlo estimate of ``E[r_j + u_i]`` for one edge.

    ``mean_revenue`` / ``mean_utility`` are the two components; ``lower`` is a
    one-sided 99% lower confidence bound on the mean and ``half_width`` the
    matching two-sided 99% half width.
    """

    edge: tuple
    eps: float
    trials: int
    mean: float
    std: float
    lower: float
    half_width: float
    target: float
    holds: bool
    mean_revenue: float
    mean_utility: float


def check_revenue_utility_edge_bound(instance: BipartiteInstance, eps: float, edge: tuple,
                                     trials: int, seed: int) -> EdgeBoundEstimate:
    """Estimate ``E[r_j + u_i]`` for edge ``(i, j)`` (buyer, seller) over random ranks.

    ``holds`` means the 99% lower confidence bound clears ``(1 - 1/e - eps) w_j``.
    """
    i, j = edge
    if instance.weights is None:
        raise CheckError("instance has no weights")
    if not 0 <= i < instance.n_buyers or j not in instance.adjacency[i]:
        raise CheckError(f"edge {edge} not in instance")
    if trials < 1000:
        raise CheckError("need at least 1000 trials")
    if eps < 0:
        raise CheckError("eps must be non-negative")
    ranks = seeding.rank_matrix(seed, 0, trials, instance.n_sellers)
    choices = batch_choices(instance, "eps_ranking", ranks, eps)
    price = prices(instance, ranks, eps)
    w = np.asarray(instance.weights)
    rows = np.arange(trials)
    # r_j: price of j if j got matched at all (each seller matches at most once)
    j_matched = (choices == j).any(axis=1)
    r_j = np.where(j_matched, price[:, j], 0.0)
    ci = choices[:, i]
    u_i = np.where(ci >= 0, w[np.maximum(ci, 0)] - price[rows, np.maximum(ci, 0)], 0.0)
    total = r_j + u_i
    mean = float(total.mean())
    std = float(total.std(ddof=1))
    se = std / math.sqrt(trials)
    lower = float(mean - norm.ppf(0.99) * se)
    target = (1.0 - 1.0 / math.e - eps) * instance.weights[j]
    return EdgeBoundEstimate(edge, eps, trials, mean, std, lower, float(norm.ppf(0.995) * se),
                             target, bool(lower >= target), float(r_j.mean()), float(u_i.mean()))


def _suite_bipartite(rng, weighted: bool) -> BipartiteInstance:
    n_s = int(rng.integers(1, SUITE_MAX_SIDE + 1))
    n_b = int(rng.integers(1, SUITE_MAX_SIDE + 1))
    p = float(rng.choice(SUITE_DENSITIES))
    return gen_random_bipartite(n_s, n_b, p, int(rng.integers(2**63)),
                                SUITE_WEIGHT_RANGE if weighted else None)


def _suite_fully_online(rng) -> FullyOnlineInstance:
    n = int(rng.integers(2, SUITE_MAX_SIDE + 1))
    p = float(rng.choice(SUITE_DENSITIES))
    return gen_random_fully_online(n, p, int(rng.integers(2**63)),
                                   noncrossing=bool(rng.integers(2)))


def suite_case(lemma_id: str, case_seed: int, eps: Optional[float] = None):
    """Build and run one randomized case; returns ``(report, instance)``."""
    if lemma_id not in LEMMAS:
        raise CheckError(f"unknown lemma id {lemma_id!r}; choose from {', '.join(LEMMAS)}")
    rng = np.random.default_rng(case_seed)
    engine = LEMMA_ENGINE[lemma_id]
    if engine == "eps_ranking" and eps is None:
        eps = float(rng.choice(SUITE_EPS))
    if engine == "fully_online":
        g = _suite_fully_online(rng)
        dim = g.n_vertices
    else:
        g = _suite_bipartite(rng, weighted=engine == "eps_ranking")
        dim = g.n_sellers
    x = rng.random(dim)
    j = int(rng.integers(dim))
    e = eps if engine == "eps_ranking" else None
    if lemma_id in ("L3", "L5", "L7"):
        rep = check_bounded_difference(g, engine, x, j, float(rng.random()), e)
    elif lemma_id in ("L4", "L6", "L8"):
        rep = check_vertex_removal(g, engine, x, j, e)
    elif lemma_id == "L8-utility":
        rep = check_utility_monotonicity(g, x, j, e)
    else:
        edges = g.edges
        if not edges:
            return LemmaReport("L9", engine, True, 0.0, 0.0, 0.0, {"note": "no edges"}), g
        b, s = edges[int(rng.integers(len(edges)))]
        est = check_revenue_utility_edge_bound(g, e, (b, s), 1000, int(rng.integers(2**63)))
        rep = LemmaReport("L9", engine, est.holds, est.mean, est.lower, est.target,
                          {"edge": (b, s), "eps": e})
    return rep, g


def run_suite(lemma_id: str, cases: int, seed: int,
              eps: Optional[float] = None) -> Iterator[tuple[int, LemmaReport]]:
    """Yield ``(case_seed, report)`` for ``cases`` randomized cases.

    Case ``k`` is fully determined by ``derive_seed(seed, k)``. With ``eps``
    unset, weighted cases draw eps from ``SUITE_EPS``.
    """
    for k in range(cases):
        cs = seeding.derive_seed(seed, k)
        rep, _ = suite_case(lemma_id, cs, eps)
        yield cs, rep

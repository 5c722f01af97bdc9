"""Seeded Monte Carlo campaigns and their comparison with analytic tail bounds."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from . import seeding
from .engines import (WEIGHTED_ENGINES, batch_choices, batch_objectives, check_compatible,
                      prices, rank_dimension, run_ranking_permutation)
from .graph_core import BipartiteInstance, FullyOnlineInstance, Instance

ONE_MINUS_INV_E = 1.0 - 1.0 / math.e
RHO_GENERAL = 0.521
RHO_BIPARTITE = 0.567
DEFAULT_ALPHAS = tuple(round(0.05 * k, 2) for k in range(1, 11))
CONFIDENCE = 0.99
CHUNK = 8192
RESULT_COLUMNS = ("instance_id", "engine", "eps", "master_seed", "trials", "alpha", "threshold",
                  "empirical_tail", "ci_upper", "theoretical_bound", "satisfied", "mean_ratio",
                  "oracle_objective")


@dataclass
class EmpiricalDistribution:
    values: np.ndarray
    trials: int
    master_seed: int
    instance_id: str = ""
    engine: str = "ranking"
    eps: Optional[float] = None
    # worst relative |sum r + sum u - w(M)| over weighted trials
    max_accounting_error: Optional[float] = None

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def standard_error(self) -> float:
        if self.trials < 2:
            return 0.0
        return float(self.values.std(ddof=1) / math.sqrt(self.trials))


@dataclass(frozen=True)
class TailComparison:
    """One grid point of an empirical-vs-analytic tail comparison.

    A violation is only claimed when the Wilson lower bound on the tail
    probability exceeds the analytic bound.
    """

    alpha: float
    threshold: float
    empirical_tail: float
    ci_upper: float
    theoretical_bound: float
    satisfied: bool
    ci_lower: float = 0.0
    violations: int = 0


def mcdiarmid_bound(c: Sequence[float], t: float) -> float:
    """``exp(-2 t^2 / sum c_i^2)``."""
    c = np.asarray(c, dtype=np.float64)
    if not t > 0:
        raise ValueError("t must be positive")
    if np.any(c < 0):
        raise ValueError("bounded-difference constants must be non-negative")
    s = float(np.sum(c * c))
    if not s > 0:
        raise ValueError("sum of squared constants must be positive")
    return math.exp(-2.0 * t * t / s)


def theoretical_tail(theorem: str, alpha: float, n: Optional[float] = None,
                     rho: Optional[float] = None, opt_weight: Optional[float] = None,
                     weight_norm_sq: Optional[float] = None) -> tuple[float, float]:
    """Return ``(bound, threshold)`` for the three tail statements.

    * ``T1``: ``P[|M| < (1 - 1/e - alpha) n] < exp(-2 alpha^2 n)``
    * ``T2``: ``P[|M| < (rho - alpha) n] < exp(-alpha^2 n)``, rho defaults to
      ``RHO_GENERAL``
    * ``T3``: ``P[w(M) < (1 - 1/e - alpha) w(M*)] < exp(-alpha^4 w(M*)^2 / (50 ||w||^2))``
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if theorem in ("T1", "T2"):
        if n is None or n < 1:
            raise ValueError(f"{theorem} needs n >= 1")
        if theorem == "T1":
            return math.exp(-2.0 * alpha * alpha * n), (ONE_MINUS_INV_E - alpha) * n
        rho = RHO_GENERAL if rho is None else rho
        if not 0 < rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        return math.exp(-alpha * alpha * n), (rho - alpha) * n
    if theorem == "T3":
        if opt_weight is None or not opt_weight > 0:
            raise ValueError("T3 needs opt_weight > 0")
        if weight_norm_sq is None or not weight_norm_sq > 0:
            raise ValueError("T3 needs weight_norm_sq > 0")
        exponent = alpha ** 4 * opt_weight ** 2 / (50.0 * weight_norm_sq)
        return math.exp(-exponent), (ONE_MINUS_INV_E - alpha) * opt_weight
    raise ValueError(f"unknown theorem {theorem!r}")


def wilson_interval(successes: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """One-sided Wilson score bounds ``(lower, upper)``, each at ``confidence``."""
    if n <= 0:
        raise ValueError("n must be positive")
    z = float(norm.ppf(confidence))
    phat = successes / n
    denom = 1.0 + z * z / n
    centre = phat + z * z / (2 * n)
    spread = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    lower = max(0.0, float((centre - spread) / denom))
    upper = min(1.0, float((centre + spread) / denom))
    if successes == 0:
        lower = 0.0
    if successes == n:
        upper = 1.0
    return lower, upper


def _chunk_values(args):
    instance, engine, eps, seed, start, stop = args
    ranks = seeding.rank_matrix(seed, start, stop, rank_dimension(instance))
    choices = batch_choices(instance, engine, ranks, eps)
    values = batch_objectives(instance, engine, choices)
    acct = None
    if engine in WEIGHTED_ENGINES:
        e = eps if engine == "eps_ranking" else 0.0
        price = prices(instance, ranks, e)
        w = np.asarray(instance.weights)
        rows = np.arange(stop - start)
        revenue = np.zeros(stop - start)
        utility = np.zeros(stop - start)
        for b in instance.arrival_order:
            c = choices[:, b]
            hit = c >= 0
            p = np.where(hit, price[rows, np.maximum(c, 0)], 0.0)
            revenue += p
            utility += np.where(hit, w[np.maximum(c, 0)] - p, 0.0)
        gap = np.abs(revenue + utility - values)
        acct = float(np.max(np.where(values > 0, gap / np.where(values > 0, values, 1.0), gap)))
    return values, acct


def monte_carlo(instance: Instance, engine: str, trials: int, master_seed: int,
                eps: Optional[float] = None, instance_id: str = "", workers: int = 1,
                chunk: int = CHUNK) -> EmpiricalDistribution:
    """Run ``trials`` independent runs; trial ``k`` uses ``seeding.rank_matrix`` row ``k``.

    Work is split into chunks of trial indices and reassembled in index order,
    so the result does not depend on ``workers`` or ``chunk``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check_compatible(instance, engine, eps)
    jobs = [(instance, engine, eps, master_seed, s, min(s + chunk, trials))
            for s in range(0, trials, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk_values, jobs))
    else:
        parts = [_chunk_values(j) for j in jobs]
    values = np.concatenate([p[0] for p in parts])
    acct = None
    if engine in WEIGHTED_ENGINES:
        acct = max(p[1] for p in parts)
    return EmpiricalDistribution(values, trials, master_seed, instance_id, engine, eps, acct)


def exact_expectation_small(instance: BipartiteInstance, engine: str = "ranking",
                            max_sellers: int = 8) -> Fraction:
    """Exact ``E|M|`` of rank-based Ranking by averaging over every seller order."""
    if engine != "ranking" or not isinstance(instance, BipartiteInstance) or instance.weighted:
        raise ValueError("exact expectation is only available for unweighted bipartite Ranking")
    if instance.n_sellers > max_sellers:
        raise ValueError(f"{instance.n_sellers} sellers exceeds cap {max_sellers}")
    total = 0
    count = 0
    for perm in permutations(range(instance.n_sellers)):
        total += run_ranking_permutation(instance, perm).size
        count += 1
    return Fraction(total, count)


def compare_tail(dist: EmpiricalDistribution, theorem: str, oracle_objective: float,
                 alphas: Sequence[float] = DEFAULT_ALPHAS, rho: Optional[float] = None,
                 weight_norm_sq: Optional[float] = None) -> list[TailComparison]:
    """Empirical ``P[value < threshold(alpha)]`` against the analytic bound per alpha."""
    if dist.trials < 1:
        raise ValueError("empty distribution")
    rows = []
    for a in alphas:
        if theorem == "T3":
            bound, thr = theoretical_tail("T3", a, opt_weight=oracle_objective,
                                          weight_norm_sq=weight_norm_sq)
        else:
            bound, thr = theoretical_tail(theorem, a, n=oracle_objective, rho=rho)
        hits = int(np.count_nonzero(dist.values < thr))
        tail = hits / dist.trials
        lo, hi = wilson_interval(hits, dist.trials)
        ok = tail <= bound or lo <= bound
        rows.append(TailComparison(float(a), thr, tail, hi, bound, bool(ok), lo, hits))
    return rows


@dataclass(frozen=True)
class RatioSummary:
    mean: float
    min: float
    max: float
    std: float
    lower_99: float


def competitive_ratio_summary(dist: EmpiricalDistribution, oracle_objective: float) -> RatioSummary:
    """Ratio statistics with a one-sided 99% normal lower bound on the mean."""
    if not oracle_objective > 0:
        raise ValueError("oracle objective must be positive")
    r = dist.values / oracle_objective
    std = float(r.std(ddof=1)) if len(r) > 1 else 0.0
    mean = float(r.mean())
    return RatioSummary(mean, float(r.min()), float(r.max()), std,
                        float(mean - norm.ppf(CONFIDENCE) * std / math.sqrt(len(r))))


def is_bipartite_graph(instance: FullyOnlineInstance) -> bool:
    colour: dict[int, int] = {}
    for start in instance.live_vertices:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in instance.adjacency[v]:
                if u not in colour:
                    colour[u] = 1 - colour[v]
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return False
    return True


def default_rho(instance: Instance) -> float:
    if isinstance(instance, FullyOnlineInstance) and not is_bipartite_graph(instance):
        return RHO_GENERAL
    return RHO_BIPARTITE


THEOREM_ENGINE = {"T1": "ranking", "T2": "fully_online", "T3": "eps_ranking"}


def oracle_objective(instance: Instance, theorem: str) -> float:
    from .oracles import max_matching_bipartite, max_matching_general, max_weight_seller_matching
    if theorem == "T3":
        return max_weight_seller_matching(instance).objective
    if isinstance(instance, FullyOnlineInstance):
        return max_matching_general(instance).objective
    return max_matching_bipartite(instance).objective


def run_concentration(instance: Instance, theorem: str, trials: int, master_seed: int,
                      engine: Optional[str] = None, eps: Optional[float] = None,
                      alphas: Sequence[float] = DEFAULT_ALPHAS, instance_id: str = "",
                      rho: Optional[float] = None, workers: int = 1):
    """Full tail experiment for one instance; returns ``(rows, distributions)``.

    ``rows`` are dicts keyed by ``RESULT_COLUMNS``. For ``T3`` without an
    explicit ``eps`` each alpha gets its own campaign with ``eps = alpha / 2``.
    """
    engine = engine or THEOREM_ENGINE[theorem]
    opt = oracle_objective(instance, theorem)
    if not opt > 0:
        raise ValueError("oracle objective is zero; tail bounds are vacuous")
    norm_sq = None
    if theorem == "T3":
        norm_sq = math.fsum(instance.weights[j] ** 2 for j in instance.live_sellers)
    if theorem == "T2" and rho is None:
        rho = default_rho(instance)
    if theorem == "T3" and eps is None:
        groups = [((a,), a / 2.0) for a in alphas]
    else:
        groups = [(tuple(alphas), eps)]
    rows, dists = [], []
    for group_alphas, e in groups:
        dist = monte_carlo(instance, engine, trials, master_seed, eps=e,
                           instance_id=instance_id, workers=workers)
        dists.append(dist)
        ratio = competitive_ratio_summary(dist, opt).mean
        for cmp in compare_tail(dist, theorem, opt, group_alphas, rho=rho, weight_norm_sq=norm_sq):
            rows.append({
                "instance_id": instance_id, "engine": engine,
                "eps": "" if e is None else e, "master_seed": master_seed, "trials": trials,
                "alpha": cmp.alpha, "threshold": cmp.threshold,
                "empirical_tail": cmp.empirical_tail, "ci_upper": cmp.ci_upper,
                "theoretical_bound": cmp.theoretical_bound, "satisfied": cmp.satisfied,
                "mean_ratio": ratio, "oracle_objective": opt,
            })
    return rows, dists

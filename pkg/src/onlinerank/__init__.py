"""Ranking-family online matching: engines, exact oracles, structural checks
and seeded Monte Carlo tail experiments."""
from .engines import (run_engine, run_eps_ranking, run_fully_online_ranking, run_ranking,
                      run_ranking_permutation, run_single_valued_ranking)
from .graph_core import (BipartiteInstance, FullyOnlineInstance, expand_capacities,
                         induce_on_matched_sellers, remove_vertex, validate)

__version__ = "0.1.0"

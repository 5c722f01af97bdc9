"""JSON instance files.

Bipartite::

    {"kind": "bipartite", "sellers": n, "buyers": m,
     "edges": [[buyer, seller], ...], "arrival_order": [...],
     "weights": [...], "capacities": [...]}

Fully online::

    {"kind": "fully_online", "vertices": n,
     "events": [[vertex, "arrive" | "depart", num, den], ...],
     "edges": [[u, v], ...]}

``weights`` and ``capacities`` are optional. Unknown top-level keys (such as
the ``generator`` provenance block) are ignored on load.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .graph_core import BipartiteInstance, FullyOnlineInstance, Instance


class InstanceFormatError(ValueError):
    pass


def instance_to_dict(instance: Instance) -> dict:
    if isinstance(instance, BipartiteInstance):
        d = {
            "kind": "bipartite",
            "sellers": instance.n_sellers,
            "buyers": instance.n_buyers,
            "edges": [[b, s] for b, s in instance.edges],
            "arrival_order": list(instance.arrival_order),
        }
        if instance.weights is not None:
            d["weights"] = list(instance.weights)
        if instance.capacities is not None:
            d["capacities"] = list(instance.capacities)
    else:
        events = []
        for v in range(instance.n_vertices):
            for kind, t in (("arrive", instance.arrival[v]), ("depart", instance.departure[v])):
                events.append([v, kind, t.numerator, t.denominator])
        events.sort(key=lambda e: Fraction(e[2], e[3]))
        d = {
            "kind": "fully_online",
            "vertices": instance.n_vertices,
            "events": events,
            "edges": [list(e) for e in instance.edges],
        }
    if instance.removed:
        d["removed"] = sorted(instance.removed)
    return d


def instance_from_dict(d: dict) -> Instance:
    try:
        kind = d["kind"]
        if kind == "bipartite":
            g = BipartiteInstance.from_edges(
                int(d["sellers"]), int(d["buyers"]),
                [(int(b), int(s)) for b, s in d["edges"]],
                arrival_order=d.get("arrival_order"),
                weights=d.get("weights"),
                capacities=d.get("capacities"),
            )
        elif kind == "fully_online":
            n = int(d["vertices"])
            arrive: list = [None] * n
            depart: list = [None] * n
            for v, what, num, den in d["events"]:
                t = Fraction(int(num), int(den))
                if what == "arrive":
                    arrive[v] = t
                elif what == "depart":
                    depart[v] = t
                else:
                    raise InstanceFormatError(f"unknown event kind {what!r}")
            if any(t is None for t in arrive + depart):
                raise InstanceFormatError("every vertex needs one arrive and one depart event")
            g = FullyOnlineInstance.from_intervals(list(zip(arrive, depart)),
                                                   [tuple(e) for e in d["edges"]])
        else:
            raise InstanceFormatError(f"unknown instance kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise InstanceFormatError(f"malformed instance: {exc}") from exc
    if d.get("removed"):
        from .graph_core import remove_vertex
        for v in d["removed"]:
            g = remove_vertex(g, int(v))
    return g


def dumps(instance: Instance, extra: dict | None = None) -> str:
    d = instance_to_dict(instance)
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=False) + "\n"


def save(instance: Instance, path, extra: dict | None = None) -> None:
    Path(path).write_text(dumps(instance, extra))


def load(path) -> Instance:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON ({exc})") from exc
    return instance_from_dict(d)

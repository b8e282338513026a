"""Shipped benchmark encodings and small instance generators.

Rule files: ``hcp`` (Hamilton cycles, needs ``-c i=<start>``), ``queens``
(``-c q=<n>``), ``pigeon`` (``-c p=<pigeons> h=<holes>``), ``color`` and
``schur`` (``-c b=<boxes> n=<max>``).  Data files: ``1.gph``, ``k4.gph``,
``c5.gph``, ``queens.edb``, ``pigeon.edb``, ``schur.edb``.
"""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

RULE_FILES = ("hcp", "queens", "pigeon", "color", "schur")
DATA_FILES = ("1.gph", "k4.gph", "c5.gph", "queens.edb", "pigeon.edb", "schur.edb")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def read(name: str) -> str:
    return path(name).read_text()


def digraph_edb(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> str:
    lines = [f"vtx({v})." for v in vertices]
    lines += [f"edge({a},{b})." for a, b in edges]
    return "\n".join(lines) + "\n"


def random_digraph(n_vertices: int, p: float, seed: int) -> list[tuple[int, int]]:
    """Each ordered pair (no loops) becomes an edge with probability p."""
    rng = random.Random(seed)
    return [
        (a, b)
        for a in range(1, n_vertices + 1)
        for b in range(1, n_vertices + 1)
        if a != b and rng.random() < p
    ]


def digraph_with_degree(n_vertices: int, n_edges: int, seed: int, min_degree: int = 2) -> list[tuple[int, int]]:
    """Random loop-free digraph with exactly ``n_edges`` edges.

    Every vertex gets at least ``min_degree`` in- and out-edges: the
    graph starts from ``min_degree`` edge-disjoint random cycles.
    """
    if n_edges < min_degree * n_vertices or n_edges > n_vertices * (n_vertices - 1):
        raise ValueError("edge count out of range")
    rng = random.Random(seed)
    edges: dict[tuple[int, int], None] = {}
    verts = list(range(1, n_vertices + 1))
    while len(edges) < min_degree * n_vertices:
        edges.clear()
        for _ in range(min_degree):
            order = verts[:]
            rng.shuffle(order)
            for a, b in zip(order, order[1:] + order[:1]):
                edges[(a, b)] = None
    others = [(a, b) for a in verts for b in verts if a != b and (a, b) not in edges]
    for e in rng.sample(others, n_edges - len(edges)):
        edges[e] = None
    return sorted(edges)


def load(rule: str, data: Sequence[str], bindings: Optional[Mapping[str, object]] = None, extra_data: Sequence[str] = ()):
    """Ground a shipped rule file over shipped data files (plus raw data texts)."""
    from ..grounder import ground_sources

    return ground_sources(read(rule), [read(d) for d in data] + list(extra_data), bindings or {})

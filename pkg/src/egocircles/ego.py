"""Ego networks: the subgraph induced on an author's coauthors, ego excluded."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .corpus import CoauthorGraph

DEFAULT_MIN_ALTERS = 3


@dataclass(frozen=True)
class EgoNetwork:
    ego_id: str
    alters: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    """Induced edges as ``(i, j)`` alter-index pairs with ``i < j``."""
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.alters)})

    @property
    def n(self) -> int:
        return len(self.alters)

    def index(self, alter: str) -> int:
        return self._index[alter]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def edge_ids(self) -> list[tuple[str, str]]:
        return [(self.alters[i], self.alters[j]) for i, j in self.edges]

    @classmethod
    def from_edges(cls, ego_id: str, alters, edges) -> "EgoNetwork":
        """Build from alter ids and id-pair edges (test and synthetic fixtures)."""
        alters = tuple(alters)
        pos = {a: i for i, a in enumerate(alters)}
        idx = sorted({tuple(sorted((pos[a], pos[b]))) for a, b in edges if a != b})
        return cls(ego_id, alters, tuple(idx))


def ego_network(graph: CoauthorGraph, ego: str) -> EgoNetwork:
    if ego not in graph:
        raise KeyError(f"unknown ego id {ego!r}")
    alters = tuple(sorted(graph.neighbors(ego)))
    pos = {a: i for i, a in enumerate(alters)}
    edges = []
    for i, a in enumerate(alters):
        for b in graph.neighbors(a):
            j = pos.get(b)
            if j is not None and j > i:
                edges.append((i, j))
    edges.sort()
    return EgoNetwork(ego, alters, tuple(edges))


def enumerate_egos(graph: CoauthorGraph, min_alters: int = DEFAULT_MIN_ALTERS) -> Iterator[EgoNetwork]:
    if min_alters < 0:
        raise ValueError("min_alters must be >= 0")
    for node in graph.nodes:
        if graph.degree(node) >= min_alters:
            yield ego_network(graph, node)

"""Author profile vectors and the profile distance / similarity primitives.

Profile layout (with F configured fields, F = 24 gives 67 entries)::

    citations, citations_per_paper, h_index, coauthor_count,   general
    versatility[F], paper_count, persistence[5], major_field,
    co_decade[5], co_field[F], common_coauthors,                ego-centric
    alter_in_ego_major, ego_in_alter_major

Counts are divided by their maximum over all authors of the same snapshot
(``NormalizationTable``); ``major_field`` is encoded as ``index / (F - 1)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .corpus import CoauthorGraph, PaperCorpus, PaperRecord, build_graph

SIM_CAP = 1e6
EPS = 1e-6
N_DECADES = 5


def profile_columns(n_fields: int = 24) -> list[str]:
    cols = ["citations", "citations_per_paper", "h_index", "coauthor_count"]
    cols += [f"versatility_{i}" for i in range(n_fields)]
    cols += ["paper_count"]
    cols += [f"persistence_{i}" for i in range(N_DECADES)]
    cols += ["major_field"]
    cols += [f"co_decade_{i}" for i in range(N_DECADES)]
    cols += [f"co_field_{i}" for i in range(n_fields)]
    cols += ["common_coauthors", "alter_in_ego_major", "ego_in_alter_major"]
    return cols


PROFILE_COLUMNS = profile_columns()


def h_index(citation_counts) -> int:
    counts = sorted(citation_counts, reverse=True)
    h = 0
    for i, c in enumerate(counts, 1):
        if c >= i:
            h = i
        else:
            break
    return h


def _field_counts(papers: list[PaperRecord], n_fields: int) -> np.ndarray:
    counts = np.zeros(n_fields)
    for p in papers:
        counts[p.field_id] += 1
    return counts


def versatility(corpus: PaperCorpus, author: str) -> np.ndarray:
    papers = [p for p in corpus.papers if author in p.author_ids]
    if not papers:
        raise ValueError(f"author {author!r} has no papers")
    return _field_counts(papers, corpus.config.n_fields) / len(papers)


def _argmax_lowest(counts: np.ndarray) -> int:
    # np.argmax returns the first maximal index, which is the lowest-index tie-break
    return int(np.argmax(counts))


def major_field(corpus: PaperCorpus, author: str) -> int:
    return _argmax_lowest(versatility(corpus, author))


@dataclass
class NormalizationTable:
    """Snapshot-wide maxima used to scale count features into [0, 1]."""
    citations: float
    citations_per_paper: float
    h_index: float
    coauthor_count: float
    paper_count: float
    persistence: list[float]
    common_coauthors: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NormalizationTable":
        return cls(**json.loads(text))


def _safe_div(x, m):
    return x / m if m > 0 else 0.0 * x


class SnapshotStats:
    """Per-author statistics over one corpus snapshot."""

    def __init__(self, corpus: PaperCorpus, graph: CoauthorGraph | None = None):
        self.corpus = corpus
        self.graph = graph if graph is not None else build_graph(corpus)
        self.n_fields = corpus.config.n_fields
        self.papers = corpus.papers_by_author()
        nf = self.n_fields
        self.citations: dict[str, int] = {}
        self.h: dict[str, int] = {}
        self.fields: dict[str, np.ndarray] = {}
        self.decades: dict[str, np.ndarray] = {}
        for a, ps in self.papers.items():
            self.citations[a] = sum(p.citation_count for p in ps)
            self.h[a] = h_index([p.citation_count for p in ps])
            self.fields[a] = _field_counts(ps, nf)
            dec = np.zeros(N_DECADES)
            for p in ps:
                d = corpus.config.decade_of(p.year)
                if d is not None:
                    dec[d] += 1
            self.decades[a] = dec

    def paper_count(self, a: str) -> int:
        return len(self.papers[a])

    def coauthor_count(self, a: str) -> int:
        return len(self.graph.adj.get(a, ()))

    def major_field(self, a: str) -> int:
        return _argmax_lowest(self.fields[a])

    def versatility(self, a: str) -> np.ndarray:
        return self.fields[a] / self.paper_count(a)

    def common_coauthors(self, a: str, b: str) -> int:
        adj = self.graph.adj
        return len(adj.get(a, set()) & adj.get(b, set()))

    def shared_papers(self, a: str, b: str) -> list[PaperRecord]:
        pa, pb = self.papers.get(a, []), self.papers.get(b, [])
        other = b
        if len(pa) > len(pb):
            pa, other = pb, a
        return [p for p in pa if other in p.author_ids]

    @cached_property
    def norms(self) -> NormalizationTable:
        authors = list(self.papers)
        if not authors:
            return NormalizationTable(0, 0, 0, 0, 0, [0.0] * N_DECADES, 0)
        common = 0
        for a, b in self.graph.edge_info:
            common = max(common, self.common_coauthors(a, b))
        return NormalizationTable(
            citations=float(max(self.citations.values())),
            citations_per_paper=max(self.citations[a] / self.paper_count(a) for a in authors),
            h_index=float(max(self.h.values())),
            coauthor_count=float(max(self.coauthor_count(a) for a in authors)),
            paper_count=float(max(self.paper_count(a) for a in authors)),
            persistence=np.max(np.stack([self.decades[a] for a in authors]), axis=0).tolist(),
            common_coauthors=float(common),
        )


def general_features(stats: SnapshotStats, a: str, norms: NormalizationTable) -> np.ndarray:
    if a not in stats.papers:
        raise KeyError(f"no statistics for author {a!r}")
    n = stats.paper_count(a)
    head = [
        _safe_div(stats.citations[a], norms.citations),
        _safe_div(stats.citations[a] / n, norms.citations_per_paper),
        _safe_div(stats.h[a], norms.h_index),
        _safe_div(stats.coauthor_count(a), norms.coauthor_count),
    ]
    pers = np.array([_safe_div(c, m) for c, m in zip(stats.decades[a], norms.persistence)])
    major = stats.major_field(a) / max(stats.n_fields - 1, 1)
    return np.concatenate([
        head, stats.versatility(a), [_safe_div(n, norms.paper_count)], pers, [major],
    ])


def ego_features(stats: SnapshotStats, ego: str, alter: str, norms: NormalizationTable) -> np.ndarray:
    shared = stats.shared_papers(ego, alter)
    co_dec = np.zeros(N_DECADES)
    co_fld = np.zeros(stats.n_fields)
    for p in shared:
        d = stats.corpus.config.decade_of(p.year)
        if d is not None:
            co_dec[d] += 1
        co_fld[p.field_id] += 1
    if shared:
        co_dec /= len(shared)
        co_fld /= len(shared)
    common = _safe_div(stats.common_coauthors(ego, alter), norms.common_coauthors)
    alter_in_ego = stats.fields[alter][stats.major_field(ego)] / stats.paper_count(alter)
    ego_in_alter = stats.fields[ego][stats.major_field(alter)] / stats.paper_count(ego)
    return np.concatenate([co_dec, co_fld, [common, alter_in_ego, ego_in_alter]])


def profile(stats: SnapshotStats, ego: str, alter: str,
            norms: NormalizationTable | None = None) -> np.ndarray:
    norms = norms or stats.norms
    return np.concatenate([general_features(stats, alter, norms),
                           ego_features(stats, ego, alter, norms)])


def ego_profiles(stats: SnapshotStats, ego_net, norms: NormalizationTable | None = None) -> np.ndarray:
    """Stack of alter profiles for one ego network, rows in alter order."""
    norms = norms or stats.norms
    width = len(profile_columns(stats.n_fields))
    if ego_net.n == 0:
        return np.zeros((0, width))
    return np.stack([profile(stats, ego_net.ego_id, a, norms) for a in ego_net.alters])


def distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"profile length mismatch: {a.shape} vs {b.shape}")
    return math.sqrt(float(np.sum((a - b) ** 2)))


def similarity_from_distance(d):
    """1 / max(d, EPS), capped at SIM_CAP. Works elementwise on arrays."""
    return np.minimum(1.0 / np.maximum(d, EPS), SIM_CAP)


def similarity(a, b) -> float:
    return float(similarity_from_distance(distance(a, b)))


def distance_matrix(profiles: np.ndarray) -> np.ndarray:
    """Symmetric pairwise Euclidean distances (exactly symmetric, zero diagonal)."""
    profiles = np.asarray(profiles, dtype=float)
    if len(profiles) < 2:
        return np.zeros((len(profiles), len(profiles)))
    return squareform(pdist(profiles))


def similarity_matrix(profiles: np.ndarray) -> np.ndarray:
    return similarity_from_distance(distance_matrix(profiles))


def similarity_edge_stats(graph: CoauthorGraph, profiles: dict, bin_width: float):
    """Edge frequency per similarity bin over all node pairs that have a profile.

    Returns rows ``(bin_lo, p_edge, n_edges, n_pairs)`` for every nonempty bin,
    where a pair falls into bin ``floor(sim / bin_width)``.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    nodes = sorted(profiles)
    counts: dict[int, list[int]] = {}
    for i, x in enumerate(nodes):
        for y in nodes[i + 1:]:
            b = math.floor(similarity(profiles[x], profiles[y]) / bin_width)
            row = counts.setdefault(b, [0, 0])
            row[1] += 1
            if graph.has_edge(x, y):
                row[0] += 1
    return [(b * bin_width, e / n, e, n) for b, (e, n) in sorted(counts.items())]

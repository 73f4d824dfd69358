"""Synthetic ego networks and temporal corpora with planted overlapping circles."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import CorpusConfig, PaperCorpus, PaperRecord
from .ego import EgoNetwork


@dataclass
class PlantedEgoSpec:
    sizes: tuple[int, ...] = (10, 10, 10)
    overlap: float = 0.0
    p_in: float = 0.8
    p_out: float = 0.05
    sigma_within: float = 0.02
    sigma_between: float = 0.3
    n_features: int = 67
    seed: int = 0

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if not 0 <= self.p_out < self.p_in <= 1:
            raise ValueError("need 0 <= p_out < p_in <= 1")
        if any(s < 2 for s in self.sizes):
            raise ValueError("planted circles need at least 2 members")
        if not 0 <= self.overlap < 1:
            raise ValueError("overlap must be in [0, 1)")

    @property
    def n_circles(self) -> int:
        return len(self.sizes)


@dataclass
class PlantedTruth:
    circles: list[frozenset]
    params: dict = field(default_factory=dict)


def planted_members(sizes, overlap: float) -> list[list[int]]:
    """Circle j reuses floor(overlap * size_j) members of circle j-1 that are not shared yet."""
    circles: list[list[int]] = []
    shared: set[int] = set()
    next_id = 0
    for j, size in enumerate(sizes):
        members: list[int] = []
        if j > 0:
            k = int(np.floor(overlap * size + 1e-9))
            pool = [a for a in circles[-1] if a not in shared]
            if k > len(pool) or k >= size:
                raise ValueError(f"overlap {overlap} infeasible for sizes {tuple(sizes)}")
            members.extend(pool[-k:] if k else [])
            shared.update(members)
        while len(members) < size:
            members.append(next_id)
            next_id += 1
        circles.append(members)
    return circles


def generate_ego(spec: PlantedEgoSpec):
    """Return ``(EgoNetwork, profiles, PlantedTruth)`` for one planted ego network."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    circles = planted_members(spec.sizes, spec.overlap)
    n = 1 + max(max(c) for c in circles)
    d = spec.n_features
    centroids = np.clip(0.5 + spec.sigma_between * rng.standard_normal((spec.n_circles, d)), 0.0, 1.0)
    owner: list[list[int]] = [[] for _ in range(n)]
    for j, c in enumerate(circles):
        for a in c:
            owner[a].append(j)
    base = np.stack([centroids[owner[a]].mean(axis=0) for a in range(n)])
    profiles = np.clip(base + spec.sigma_within * rng.standard_normal((n, d)), 0.0, 1.0)
    member_sets = [frozenset(c) for c in circles]
    edges = []
    alters = tuple(f"a{i:03d}" for i in range(n))
    for i in range(n):
        for k in range(i + 1, n):
            together = any(i in c and k in c for c in member_sets)
            if rng.random() < (spec.p_in if together else spec.p_out):
                edges.append((alters[i], alters[k]))
    ego = EgoNetwork.from_edges("ego", alters, edges)
    truth = PlantedTruth([frozenset(alters[a] for a in c) for c in circles], asdict(spec))
    return ego, profiles, truth


def _f1(a: frozenset, b: frozenset) -> float:
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return 2.0 * inter / (len(a) + len(b))


def best_match_f1(detected, truth) -> float:
    detected = [frozenset(c) for c in detected]
    truth = [frozenset(c) for c in truth]
    if not detected or not truth:
        return 0.0
    fwd = np.mean([max(_f1(t, d) for d in detected) for t in truth])
    bwd = np.mean([max(_f1(d, t) for t in truth) for d in detected])
    return float((fwd + bwd) / 2.0)


def omega_index(detected, truth, nodes=None) -> float:
    """Omega index: chance-adjusted agreement on how many circles each pair shares."""
    detected = [frozenset(c) for c in detected]
    truth = [frozenset(c) for c in truth]
    if nodes is None:
        nodes = set().union(*detected, *truth)
    nodes = sorted(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    if n < 2:
        return 1.0

    def counts(cover):
        m = np.zeros((n, n), dtype=np.int64)
        for c in cover:
            ids = [idx[v] for v in c if v in idx]
            m[np.ix_(ids, ids)] += 1
        return m[np.triu_indices(n, 1)]

    a, b = counts(detected), counts(truth)
    pairs = len(a)
    observed = np.mean(a == b)
    values = np.union1d(a, b)
    expected = sum(np.sum(a == v) * np.sum(b == v) for v in values) / pairs ** 2
    if expected == 1.0:
        return 1.0 if observed == 1.0 else 0.0
    return float((observed - expected) / (1.0 - expected))


def recovery_score(detected, truth: PlantedTruth | list) -> tuple[float, float]:
    truth_circles = truth.circles if isinstance(truth, PlantedTruth) else truth
    if not detected or not truth_circles:
        raise ValueError("recovery needs nonempty detected and planted covers")
    return best_match_f1(detected, truth_circles), omega_index(detected, truth_circles)


@dataclass
class TemporalCorpusSpec:
    n_groups: int = 50
    group_size: tuple[int, int] = (8, 14)
    overlap_prob: float = 0.15
    """Probability that an author also joins a second, random group."""
    n_fields: int = 24
    group_fields: int = 6
    """Groups draw their field from this many fields, so fields alone do not identify a group."""
    years: tuple[int, int] = (1980, 2009)
    papers_per_year: int = 25
    team_size: tuple[int, int] = (2, 3)
    signal: float = 0.7
    """Probability that a paper's team is drawn from one planted group."""
    field_fidelity: float = 0.8
    mean_citations: float = 8.0
    seed: int = 0

    def __post_init__(self):
        self.group_size = tuple(self.group_size)
        self.years = tuple(self.years)
        self.team_size = tuple(self.team_size)
        if not 0 <= self.signal <= 1:
            raise ValueError("signal must be in [0, 1]")
        if self.group_size[0] < 2 or self.team_size[0] < 2:
            raise ValueError("groups and teams need at least 2 authors")


def generate_temporal_corpus(spec: TemporalCorpusSpec, config: CorpusConfig | None = None):
    """Return ``(PaperCorpus, PlantedTruth)``; teams come from planted groups with prob ``signal``."""
    config = config or CorpusConfig()
    if config.n_fields != spec.n_fields:
        config = CorpusConfig(tuple(f"field{i}" for i in range(spec.n_fields)),
                              config.decade_bins, config.year_range)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    groups: list[list[str]] = []
    authors: list[str] = []
    for g in range(spec.n_groups):
        size = int(rng.integers(spec.group_size[0], spec.group_size[1] + 1))
        members = [f"u{len(authors) + i:05d}" for i in range(size)]
        authors.extend(members)
        groups.append(members)
    for g, members in enumerate(groups):
        for a in list(members):
            if spec.n_groups > 1 and rng.random() < spec.overlap_prob:
                other = int(rng.integers(spec.n_groups - 1))
                other += other >= g
                if a not in groups[other]:
                    groups[other].append(a)
    field_pool = rng.choice(spec.n_fields, size=min(spec.group_fields, spec.n_fields), replace=False)
    group_field = [int(rng.choice(field_pool)) for _ in groups]
    impact = {a: float(rng.gamma(2.0, 0.5)) for a in authors}
    papers = []
    lo_t, hi_t = spec.team_size
    for year in range(spec.years[0], spec.years[1] + 1):
        for _ in range(spec.papers_per_year):
            size = int(rng.integers(lo_t, hi_t + 1))
            if rng.random() < spec.signal:
                g = int(rng.integers(len(groups)))
                pool = groups[g]
                fld = group_field[g] if rng.random() < spec.field_fidelity else int(rng.integers(spec.n_fields))
            else:
                pool = authors
                fld = int(rng.integers(spec.n_fields))
            team = sorted(rng.choice(pool, size=min(size, len(pool)), replace=False).tolist())
            lam = spec.mean_citations * np.mean([impact[a] for a in team])
            papers.append(PaperRecord(f"p{len(papers):06d}", year, fld, int(rng.poisson(lam)), tuple(team)))
    truth = PlantedTruth([frozenset(m) for m in groups], asdict(spec))
    return PaperCorpus(tuple(papers), config), truth

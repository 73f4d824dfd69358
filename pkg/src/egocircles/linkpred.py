"""Temporal collaboration prediction with optional circle features.

Feature modes: ``N`` node features of both endpoints, ``E`` pair features,
``NE`` both, ``NEB`` adds a shared-circle flag, ``NEBC`` adds the normalized
shared-circle count.  Pairs are always ordered ``(min id, max id)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.stats import rankdata

from .corpus import CoauthorGraph, PaperCorpus, build_graph, edge_key, snapshot
from .profiles import N_DECADES, SnapshotStats

MODES = ("N", "E", "NE", "NEB", "NEBC")


@dataclass(frozen=True)
class SplitSpec:
    train_end: int
    window: tuple[int, int]

    def __post_init__(self):
        lo, hi = self.window
        if lo <= self.train_end or hi < lo:
            raise ValueError("test window must start after train_end and be ordered")

    @classmethod
    def parse(cls, train_end: int, window: str) -> "SplitSpec":
        lo, hi = window.split(":")
        return cls(int(train_end), (int(lo), int(hi)))


@dataclass
class TemporalSplit:
    spec: SplitSpec
    train: PaperCorpus
    graph: CoauthorGraph
    stats: SnapshotStats
    positives: set
    """New edges in the window between authors already in the training graph."""
    candidates: dict
    """source -> sorted list of nodes at distance exactly 2."""


def distance_two(graph: CoauthorGraph, source: str) -> list[str]:
    nbrs = graph.adj[source]
    out = set()
    for v in nbrs:
        out.update(graph.adj[v])
    out -= nbrs
    out.discard(source)
    return sorted(out)


def temporal_split(corpus: PaperCorpus, spec: SplitSpec) -> TemporalSplit:
    train = snapshot(corpus, spec.train_end)
    graph = build_graph(train)
    if graph.number_of_edges() == 0:
        raise ValueError("training graph has no edges")
    lo, hi = spec.window
    positives = set()
    for p in corpus.papers:
        if not lo <= p.year <= hi:
            continue
        authors = [a for a in p.author_ids if a in graph]
        for i, a in enumerate(authors):
            for b in authors[i + 1:]:
                if not graph.has_edge(a, b):
                    positives.add(edge_key(a, b))
    candidates = {s: distance_two(graph, s) for s in graph.nodes if graph.degree(s) > 0}
    return TemporalSplit(spec, train, graph, SnapshotStats(train, graph), positives, candidates)


class CircleIndex:
    """Shared-circle counts for author pairs over every ego's circles."""

    def __init__(self, circles):
        self.counts: Counter = Counter()
        for c in circles:
            members = sorted(set(c))
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    self.counts[(a, b)] += 1
        self.max_count = max(self.counts.values(), default=0)

    @classmethod
    def from_detections(cls, payload: dict) -> "CircleIndex":
        """Build from the ``detect`` JSON payload."""
        return cls(c["members"] for ego in payload["egos"] for c in ego["circles"])

    def count(self, a: str, b: str) -> int:
        return self.counts.get(edge_key(a, b), 0)


class PairFeaturizer:
    def __init__(self, stats: SnapshotStats, circles: CircleIndex | None = None,
                 common_norm: float | None = None):
        self.stats = stats
        self.circles = circles
        self.norms = stats.norms
        self.common_norm = common_norm if common_norm is not None else self.norms.common_coauthors
        self._node_cache: dict[str, np.ndarray] = {}

    def node_features(self, a: str) -> np.ndarray:
        f = self._node_cache.get(a)
        if f is None:
            s, nm = self.stats, self.norms
            n = s.paper_count(a)

            def scale(x, m):
                return x / m if m > 0 else 0.0

            f = np.concatenate([
                [scale(s.citations[a], nm.citations), scale(s.h[a], nm.h_index),
                 scale(s.coauthor_count(a), nm.coauthor_count)],
                s.versatility(a),
                [scale(n, nm.paper_count)],
                s.decades[a] / n,
            ])
            self._node_cache[a] = f
        return f

    def edge_features(self, x: str, y: str) -> np.ndarray:
        s = self.stats
        shared = s.shared_papers(x, y)
        dec = np.zeros(N_DECADES)
        for p in shared:
            d = s.corpus.config.decade_of(p.year)
            if d is not None:
                dec[d] += 1
        if shared:
            dec /= len(shared)
        common = s.common_coauthors(x, y)
        common = min(common / self.common_norm, 1.0) if self.common_norm > 0 else 0.0
        x_in_y = s.fields[x][s.major_field(y)] / s.paper_count(x)
        y_in_x = s.fields[y][s.major_field(x)] / s.paper_count(y)
        return np.concatenate([dec, [common, x_in_y, y_in_x]])

    def features(self, x: str, y: str, mode: str) -> np.ndarray:
        if mode not in MODES:
            raise ValueError(f"unknown feature mode {mode!r}")
        x, y = edge_key(x, y)
        parts = []
        if "N" in mode:
            parts += [self.node_features(x), self.node_features(y)]
        if "E" in mode:
            parts.append(self.edge_features(x, y))
        if mode in ("NEB", "NEBC"):
            if self.circles is None:
                raise ValueError(f"mode {mode} needs circle data")
            c = self.circles.count(x, y)
            parts.append([1.0 if c > 0 else 0.0])
            if mode == "NEBC":
                m = self.circles.max_count
                parts.append([c / m if m > 0 else 0.0])
        return np.concatenate(parts)


def feature_length(mode: str, n_fields: int = 24) -> int:
    node = 3 + n_fields + 1 + N_DECADES
    edge = N_DECADES + 3
    return {"N": 2 * node, "E": edge, "NE": 2 * node + edge,
            "NEB": 2 * node + edge + 1, "NEBC": 2 * node + edge + 2}[mode]


def pair_features(x, y, mode, stats: SnapshotStats, circles: CircleIndex | None = None) -> np.ndarray:
    return PairFeaturizer(stats, circles).features(x, y, mode)


# ---------------------------------------------------------------- metrics

def auc(scores, labels) -> float:
    """Mann-Whitney estimate; tied scores count one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def prec_at_k(rankings: dict, truth, k: int = 20) -> float:
    """Mean over sources of the share of true links among the top-k candidates.

    ``rankings`` maps source -> candidates ordered best first; ``truth`` is a
    set of ``(source, target)`` pairs (either orientation).
    """
    vals = []
    for s, ranked in rankings.items():
        if not ranked:
            continue
        top = ranked[:k]
        hits = sum(1 for t in top if (s, t) in truth or (t, s) in truth)
        vals.append(hits / min(k, len(ranked)))
    return float(np.mean(vals)) if vals else 0.0


# ------------------------------------------------------- logistic regression

@dataclass
class LRConfig:
    learning_rate: float = 0.5
    epochs: int = 2000
    l2: float = 1e-3


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def train_lr(X, y, config: LRConfig | None = None) -> np.ndarray:
    """L2-regularized logistic regression by full-batch gradient descent.

    Returns weights with the bias last.
    """
    config = config or LRConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.min() == y.max():
        raise ValueError("training data has a single class")
    Xb = np.hstack([X, np.ones((len(X), 1))])
    w = np.zeros(Xb.shape[1])
    n = len(y)
    reg = np.full(len(w), config.l2)
    reg[-1] = 0.0
    for _ in range(config.epochs):
        grad = Xb.T @ (_sigmoid(Xb @ w) - y) / n + reg * w
        w -= config.learning_rate * grad
    return w


def lr_scores(w, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return _sigmoid(X @ w[:-1] + w[-1])


# -------------------------------------------------------- supervised random walks

@dataclass
class SRWConfig:
    alpha: float = 0.15
    tol: float = 1e-9
    max_iter: int = 500
    learning_rate: float = 0.5
    steps: int = 30
    l2: float = 1e-3
    margin: float = 0.0
    hops: int = 3


class WalkGraph:
    """Directed-edge arrays for one (sub)graph with per-edge feature rows."""

    def __init__(self, nodes, edges, features):
        self.nodes = list(nodes)
        self.pos = {v: i for i, v in enumerate(self.nodes)}
        n = len(self.nodes)
        src, dst, rows = [], [], []
        for (u, v), f in zip(edges, features):
            i, j = self.pos[u], self.pos[v]
            src += [i, j]
            dst += [j, i]
            rows += [f, f]
        self.src = np.asarray(src, dtype=np.intp)
        self.dst = np.asarray(dst, dtype=np.intp)
        self.psi = np.asarray(rows, dtype=float).reshape(len(rows), -1)
        self.n = n

    @classmethod
    def around(cls, graph: CoauthorGraph, source: str, featurizer: PairFeaturizer,
               mode: str, hops: int) -> "WalkGraph":
        """The ``hops``-ball around ``source``; edges leaving it are dropped."""
        seen = {source}
        frontier = [source]
        for _ in range(hops):
            nxt = []
            for u in frontier:
                for v in graph.adj[u]:
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        nodes = sorted(seen)
        edges = [(u, v) for u in nodes for v in graph.adj[u] if u < v and v in seen]
        feats = [featurizer.features(u, v, mode) for u, v in edges]
        return cls(nodes, edges, feats)


def _transition(g: WalkGraph, w):
    a = _sigmoid(g.psi @ w) if g.psi.shape[0] else np.zeros(0)
    out = np.bincount(g.src, weights=a, minlength=g.n)
    return a, out


def _walk(g: WalkGraph, w, source: int, alpha: float, tol: float, max_iter: int,
          with_grad: bool = False):
    a, out = _transition(g, w)
    dangling = out == 0
    q = np.where(dangling[g.src], 0.0, a / np.where(out[g.src] > 0, out[g.src], 1.0))
    Q = sparse.csr_matrix((q, (g.src, g.dst)), shape=(g.n, g.n))
    p = np.zeros(g.n)
    p[source] = 1.0
    d = g.psi.shape[1]
    dp = np.zeros((g.n, d)) if with_grad else None
    if with_grad:
        # d q_uv / d w = (da_uv * out_u - a_uv * d out_u) / out_u^2
        da = (a * (1 - a))[:, None] * g.psi
        dout = np.zeros((g.n, d))
        np.add.at(dout, g.src, da)
        safe = np.where(out[g.src] > 0, out[g.src], 1.0)[:, None]
        dq = (da * safe - a[:, None] * dout[g.src]) / safe ** 2
        dq[dangling[g.src]] = 0.0
    for _ in range(max_iter):
        lost = p[dangling].sum()
        new = (1 - alpha) * (Q.T @ p)
        new[source] += alpha + (1 - alpha) * lost
        if with_grad:
            dnew = (1 - alpha) * (Q.T @ dp)
            contrib = np.zeros((g.n, d))
            np.add.at(contrib, g.dst, p[g.src][:, None] * dq)
            dnew += (1 - alpha) * contrib
            dnew[source] += (1 - alpha) * dp[dangling].sum(axis=0)
            dp = dnew
        delta = np.abs(new - p).max()
        p = new
        if delta < tol:
            break
    return (p, dp) if with_grad else p


def srw_score(g: WalkGraph, w, source: str, alpha: float = 0.15,
              tol: float = 1e-9, max_iter: int = 500) -> np.ndarray:
    """Personalized PageRank with edge strengths logistic(w . psi_uv) and restart ``alpha``.

    Walkers at nodes without out-edges jump back to the source.
    """
    return _walk(g, np.asarray(w, dtype=float), g.pos[source], alpha, tol, max_iter)


@dataclass
class SRWTask:
    graph: WalkGraph
    source: str
    positives: list
    negatives: list


def srw_loss(tasks, w, config: SRWConfig, with_grad: bool = True):
    """Squared hinge on log-score gaps over all (positive, negative) pairs, plus L2."""
    w = np.asarray(w, dtype=float)
    loss = config.l2 * float(w @ w)
    grad = 2 * config.l2 * w
    n_pairs = 0
    for t in tasks:
        g = t.graph
        res = _walk(g, w, g.pos[t.source], config.alpha, config.tol, config.max_iter, with_grad)
        p, dp = res if with_grad else (res, None)
        logp = np.log(np.maximum(p, 1e-300))
        pi = [g.pos[v] for v in t.positives]
        ni = [g.pos[v] for v in t.negatives]
        gap = logp[ni][None, :] - logp[pi][:, None] + config.margin
        active = gap > 0
        loss += float(np.sum(np.where(active, gap, 0.0) ** 2))
        n_pairs += gap.size
        if with_grad:
            dlog = dp / np.maximum(p, 1e-300)[:, None]
            coef = 2 * np.where(active, gap, 0.0)
            grad += coef.sum(axis=0) @ dlog[ni] - coef.sum(axis=1) @ dlog[pi]
    return loss, grad


def srw_train(tasks, dim: int, config: SRWConfig | None = None, w0=None):
    """Gradient descent on ``srw_loss``; returns ``(w, loss_trace)``."""
    config = config or SRWConfig()
    tasks = [t for t in tasks if t.positives and t.negatives]
    if not tasks:
        raise ValueError("SRW training needs sources with positive and negative targets")
    w = np.zeros(dim) if w0 is None else np.array(w0, dtype=float)
    trace = []
    for _ in range(config.steps):
        loss, grad = srw_loss(tasks, w, config)
        trace.append(loss)
        w = w - config.learning_rate * grad / max(1, len(tasks))
    trace.append(srw_loss(tasks, w, config, with_grad=False)[0])
    return w, trace


# ------------------------------------------------------------- pipeline

@dataclass
class PredictConfig:
    mode: str = "NEBC"
    model: str = "lr"
    seed: int = 0
    neg_ratio: int = 5
    k: int = 20
    train_fraction: float = 0.5
    max_sources: int | None = None
    lr: LRConfig = field(default_factory=LRConfig)
    srw: SRWConfig = field(default_factory=SRWConfig)


def _sample_sources(split: TemporalSplit, rng, config: PredictConfig):
    pos_by_source: dict[str, set] = {}
    for s, cands in split.candidates.items():
        cs = set(cands)
        hits = {t for t in cands if edge_key(s, t) in split.positives}
        if hits and len(hits) < len(cs):
            pos_by_source[s] = hits
    sources = sorted(pos_by_source)
    rng.shuffle(sources)
    if config.max_sources is not None:
        sources = sources[:config.max_sources]
    cut = max(1, int(round(len(sources) * config.train_fraction)))
    return pos_by_source, sorted(sources[:cut]), sorted(sources[cut:])


def _pairs_for(sources, split, pos_by_source, rng, neg_ratio):
    """Labeled (source, target) pairs: every positive plus sampled negatives."""
    rows = []
    for s in sources:
        pos = sorted(pos_by_source[s])
        neg_pool = [t for t in split.candidates[s] if t not in pos_by_source[s]]
        k = min(len(neg_pool), neg_ratio * len(pos))
        neg = sorted(rng.choice(neg_pool, size=k, replace=False).tolist()) if k else []
        rows += [(s, t, 1) for t in pos] + [(s, t, 0) for t in neg]
    return rows


def evaluate(corpus: PaperCorpus, spec: SplitSpec, circles: CircleIndex | None,
             config: PredictConfig) -> dict:
    """Train on half of the eligible sources, report AUC and Prec@k on the rest."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    split = temporal_split(corpus, spec)
    pos_by_source, train_src, test_src = _sample_sources(split, rng, config)
    if not train_src or not test_src:
        raise ValueError("not enough sources with new collaborations to train and test")
    common_max = 0
    for s in train_src + test_src:
        for t in split.candidates[s]:
            common_max = max(common_max, split.stats.common_coauthors(s, t))
    featurizer = PairFeaturizer(split.stats, circles,
                                common_norm=max(common_max, split.stats.norms.common_coauthors))
    train_rows = _pairs_for(train_src, split, pos_by_source, rng, config.neg_ratio)
    test_rows = _pairs_for(test_src, split, pos_by_source, rng, config.neg_ratio)

    if config.model == "lr":
        X = np.stack([featurizer.features(s, t, config.mode) for s, t, _ in train_rows])
        y = np.array([lab for *_, lab in train_rows])
        w = train_lr(X, y, config.lr)

        def score_source(s, targets):
            F = np.stack([featurizer.features(s, t, config.mode) for t in targets])
            return lr_scores(w, F)
        extra = {}
    elif config.model == "srw":
        tasks = []
        for s in train_src:
            g = WalkGraph.around(split.graph, s, featurizer, config.mode, config.srw.hops)
            pos = [t for (src, t, lab) in train_rows if src == s and lab == 1]
            neg = [t for (src, t, lab) in train_rows if src == s and lab == 0]
            tasks.append(SRWTask(g, s, pos, neg))
        w, trace = srw_train(tasks, featurizer_dim(featurizer, split, config.mode), config.srw)

        def score_source(s, targets):
            g = WalkGraph.around(split.graph, s, featurizer, config.mode, config.srw.hops)
            p = srw_score(g, w, s, config.srw.alpha, config.srw.tol, config.srw.max_iter)
            return np.array([p[g.pos[t]] for t in targets])
        extra = {"srw_loss_trace": [float(x) for x in trace]}
    else:
        raise ValueError(f"unknown model {config.model!r}")

    scores, labels, rankings = [], [], {}
    for s in test_src:
        cands = split.candidates[s]
        cs = score_source(s, cands)
        lookup = dict(zip(cands, cs))
        order = sorted(range(len(cands)), key=lambda i: (-cs[i], cands[i]))
        rankings[s] = [cands[i] for i in order]
        for src, t, lab in test_rows:
            if src == s:
                scores.append(lookup[t])
                labels.append(lab)
    truth = {(s, t) for s in test_src for t in pos_by_source[s]}
    return {
        "auc": auc(scores, labels),
        f"prec@{config.k}": prec_at_k(rankings, truth, config.k),
        "n_train_sources": len(train_src), "n_test_sources": len(test_src),
        "n_train_pairs": len(train_rows), "n_test_pairs": len(test_rows),
        "n_test_positives": int(sum(labels)), "n_new_edges": len(split.positives),
        "weights": [float(x) for x in w],
        **extra,
    }


def featurizer_dim(featurizer: PairFeaturizer, split: TemporalSplit, mode: str) -> int:
    u, v = next(iter(split.graph.edge_info))
    return len(featurizer.features(u, v, mode))

"""Circle quality and descriptive statistics.

``overlapping_modularity`` is the belonging-coefficient extension of Newman
modularity (Shen et al. 2009)::

    Q_ov = 1/(2m) * sum_c sum_{i,j in c} (A_ij - k_i k_j / 2m) / (O_i O_j)

where O_i counts the circles containing node i.  The double sum includes
i == j, so a disjoint cover gives exactly Newman's Q.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .ego import EgoNetwork

BANDS = ("low-cited", "medium-cited", "highly-cited")
HOMOGENEITY_RANGES = ("<=30", "31-100", "101-200", ">200")


def _as_index_sets(ego_net: EgoNetwork, circles) -> list[list[int]]:
    out = []
    for c in circles:
        idx = sorted({ego_net.index(v) if isinstance(v, str) else int(v) for v in c})
        if idx:
            out.append(idx)
    return out


def overlapping_modularity(ego_net: EgoNetwork, circles) -> float:
    """Circles may hold alter ids or alter indices."""
    m = len(ego_net.edges)
    circles = _as_index_sets(ego_net, circles)
    if m == 0 or not circles:
        return 0.0
    adj = ego_net.adjacency().astype(float)
    k = adj.sum(axis=1)
    o = np.zeros(ego_net.n)
    for c in circles:
        o[c] += 1
    two_m = 2.0 * m
    total = 0.0
    for c in circles:
        kc = k[c]
        b = adj[np.ix_(c, c)] - np.outer(kc, kc) / two_m
        w = 1.0 / o[c]
        total += float(w @ b @ w)
    return total / two_m


def cliquishness(ego_net: EgoNetwork, circle) -> float | None:
    """Edge density inside the circle; None for circles under two members."""
    idx = _as_index_sets(ego_net, [circle])
    if not idx or len(idx[0]) < 2:
        return None
    members = set(idx[0])
    s = len(members)
    inside = sum(1 for i, j in ego_net.edges if i in members and j in members)
    return inside / (s * (s - 1) / 2)


def homogeneity(circle, major_fields: dict) -> float:
    """1 / (1 + entropy of the members' major fields), natural log."""
    if not circle:
        raise ValueError("empty circle")
    counts = Counter(major_fields[v] for v in circle)
    n = sum(counts.values())
    entropy = -sum((c / n) * math.log(c / n) for c in counts.values())
    return 1.0 / (1.0 + entropy)


def field_label(circle, major_fields: dict) -> int:
    if not circle:
        raise ValueError("empty circle")
    counts = Counter(major_fields[v] for v in circle)
    best = max(counts.values())
    return min(f for f, c in counts.items() if c == best)


def citation_band(citations: int) -> str:
    if citations > 100:
        return "highly-cited"
    if citations >= 30:
        return "medium-cited"
    return "low-cited"


def homogeneity_range(citations: int) -> str:
    if citations > 200:
        return ">200"
    if citations > 100:
        return "101-200"
    if citations > 30:
        return "31-100"
    return "<=30"


def field_circles(ego_net: EgoNetwork, major_fields: dict) -> list[list[str]]:
    """Group alters by major field: the field-based baseline cover."""
    groups: dict[int, list[str]] = {}
    for a in ego_net.alters:
        groups.setdefault(major_fields[a], []).append(a)
    return [groups[f] for f in sorted(groups)]


def _mean(xs):
    return float(np.mean(xs)) if len(xs) else float("nan")


def summarize(detections, citation_counts: dict, major_fields: dict | None = None,
              n_fields: int = 24, cliq_bin: float = 0.1) -> dict:
    """Aggregate per-ego detections into the tables behind the circle-statistics figures.

    ``detections`` is a sequence of ``(EgoNetwork, circles)`` with circles as
    collections of alter ids.  Returns a dict of table name -> list of row dicts.
    """
    detections = list(detections)
    if not detections:
        raise ValueError("summarize needs at least one ego")
    membership = Counter()
    for _, circles in detections:
        for c in circles:
            membership.update(set(c))

    per_ego = []
    sizes: list[int] = []
    size_cliq: dict[int, list[float]] = {}
    cliq_all: list[float] = []
    fig5a, fig5b, fig6 = [], [], []
    for ego_net, circles in detections:
        ego = ego_net.ego_id
        cites = citation_counts.get(ego, 0)
        csizes = [len(set(c)) for c in circles]
        cliqs = []
        for c in circles:
            q = cliquishness(ego_net, c)
            sizes.append(len(set(c)))
            if q is not None:
                cliqs.append(q)
                cliq_all.append(q)
                size_cliq.setdefault(len(set(c)), []).append(q)
        per_ego.append({
            "ego": ego, "citations": cites, "band": citation_band(cites),
            "n_alters": ego_net.n, "n_circles": len(circles),
            "mean_size": _mean(csizes), "memberships": membership.get(ego, 0),
            "mean_cliquishness": _mean(cliqs),
        })
        if major_fields is not None and circles:
            fc = [cliquishness(ego_net, c) for c in field_circles(ego_net, major_fields)]
            fig5a.append({"ego": ego, "citations": cites,
                          "detected_cliquishness": _mean(cliqs),
                          "field_cliquishness": _mean([q for q in fc if q is not None])})
            hs = [homogeneity(c, major_fields) for c in circles]
            fig5b.append({"ego": ego, "range": homogeneity_range(cites), "homogeneity": _mean(hs)})
            labels = Counter(field_label(c, major_fields) for c in circles)
            row = {"ego": ego, "band": citation_band(cites)}
            row.update({f"field_{i}": labels.get(i, 0) / len(circles) for i in range(n_fields)})
            fig6.append(row)

    bands = []
    for band in BANDS:
        rows = [r for r in per_ego if r["band"] == band]
        bands.append({
            "band": band, "n_egos": len(rows),
            "mean_circles": _mean([r["n_circles"] for r in rows]),
            "mean_size": _mean([r["mean_size"] for r in rows if r["n_circles"]]),
            "mean_memberships": _mean([r["memberships"] for r in rows]),
            "mean_cliquishness": _mean([r["mean_cliquishness"] for r in rows
                                        if not math.isnan(r["mean_cliquishness"])]),
        })

    n_circles = len(sizes)
    size_counts = Counter(sizes)
    fig4a = [{"size": s, "count": c, "percent": 100.0 * c / n_circles}
             for s, c in sorted(size_counts.items())]
    nbins = int(round(1.0 / cliq_bin))
    bins = Counter(min(int(q / cliq_bin), nbins - 1) for q in cliq_all)
    fig4b = [{"bin_lo": round(b * cliq_bin, 10), "count": bins.get(b, 0),
              "percent": 100.0 * bins.get(b, 0) / len(cliq_all) if cliq_all else 0.0}
             for b in range(nbins)]
    fig4c = [{"size": s, "mean_cliquishness": _mean(qs)} for s, qs in sorted(size_cliq.items())]
    per_ego_counts = Counter(r["n_circles"] for r in per_ego)
    fig4d = [{"n_circles": k, "percent_egos": 100.0 * c / len(per_ego)}
             for k, c in sorted(per_ego_counts.items())]
    homog = []
    for rng in HOMOGENEITY_RANGES:
        hs = [r["homogeneity"] for r in fig5b if r["range"] == rng and not math.isnan(r["homogeneity"])]
        homog.append({"range": rng, "n_egos": len(hs), "mean_homogeneity": _mean(hs),
                      "std_homogeneity": float(np.std(hs)) if hs else float("nan")})
    return {
        "fig3": per_ego, "fig3_bands": bands,
        "fig4a": fig4a, "fig4b": fig4b, "fig4c": fig4c, "fig4d": fig4d,
        "fig5a": fig5a, "fig5b": homog, "fig6": fig6,
    }

import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egocircles.ego import EgoNetwork
from egocircles.metrics import (citation_band, cliquishness, field_circles, field_label, homogeneity,
                                homogeneity_range, overlapping_modularity, summarize)


def net(n, edges):
    return EgoNetwork.from_edges("e", [str(i) for i in range(n)], [(str(a), str(b)) for a, b in edges])


def oracle_qov(n, edges, circles):
    """Direct double loop over every circle and member pair, diagonal included."""
    A = [[0] * n for _ in range(n)]
    for a, b in edges:
        A[a][b] = A[b][a] = 1
    m = len(edges)
    k = [sum(r) for r in A]
    o = [sum(1 for c in circles if v in c) for v in range(n)]
    total = 0.0
    for c in circles:
        for i in c:
            for j in c:
                total += (A[i][j] - k[i] * k[j] / (2 * m)) / (o[i] * o[j])
    return total / (2 * m)


TWO_TRIANGLES = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]


def test_two_disjoint_triangles():
    q = overlapping_modularity(net(6, TWO_TRIANGLES), [[0, 1, 2], [3, 4, 5]])
    assert abs(q - 0.5) <= 1e-9


def test_disjoint_cover_equals_newman_modularity():
    g = nx.karate_club_graph()
    n = g.number_of_nodes()
    parts = nx.community.greedy_modularity_communities(g, weight=None)
    ours = overlapping_modularity(net(n, g.edges()), [sorted(p) for p in parts])
    assert ours == pytest.approx(nx.community.modularity(g, parts, weight=None), abs=1e-12)


def test_clique_in_one_circle_is_zero():
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    assert abs(overlapping_modularity(net(5, edges), [list(range(5))])) <= 1e-12


def test_empty_cover_and_edgeless_net():
    assert overlapping_modularity(net(6, TWO_TRIANGLES), []) == 0.0
    assert overlapping_modularity(net(3, []), [[0, 1]]) == 0.0


def test_singleton_cover():
    # only the diagonal terms survive: -sum k_i^2 / (2m)^2
    g = net(6, TWO_TRIANGLES)
    q = overlapping_modularity(g, [[i] for i in range(6)])
    assert q == pytest.approx(-6 * 4 / 12 ** 2, abs=1e-12)


def test_accepts_alter_ids():
    g = net(6, TWO_TRIANGLES)
    assert overlapping_modularity(g, [["0", "1", "2"], ["3", "4", "5"]]) == pytest.approx(0.5)


covers = st.lists(st.lists(st.integers(0, 7), min_size=1, max_size=8, unique=True), min_size=1, max_size=4)
edge_lists = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)).filter(lambda e: e[0] < e[1]),
                      min_size=1, max_size=20, unique=True)


@settings(max_examples=100, deadline=None)
@given(edge_lists, covers, st.randoms(use_true_random=False))
def test_qov_matches_oracle_and_is_order_invariant(edges, cover, rnd):
    g = net(8, edges)
    q = overlapping_modularity(g, cover)
    assert q == pytest.approx(oracle_qov(8, edges, cover), abs=1e-12)
    shuffled = [rnd.sample(c, len(c)) for c in cover]
    rnd.shuffle(shuffled)
    assert overlapping_modularity(g, shuffled) == pytest.approx(q, abs=1e-12)


def test_cliquishness_examples():
    assert cliquishness(net(3, [(0, 1), (1, 2), (0, 2)]), [0, 1, 2]) == 1.0
    assert cliquishness(net(4, [(0, 1), (1, 2), (2, 3)]), [0, 1, 2, 3]) == 0.5
    assert cliquishness(net(2, []), [0, 1]) == 0.0
    assert cliquishness(net(2, []), [0]) is None


@settings(max_examples=100, deadline=None)
@given(edge_lists, st.lists(st.integers(0, 7), min_size=2, max_size=8, unique=True))
def test_cliquishness_in_unit_interval(edges, circle):
    q = cliquishness(net(8, edges), circle)
    assert 0.0 <= q <= 1.0


def test_homogeneity_examples():
    assert homogeneity(["a", "b"], {"a": 4, "b": 4}) == 1.0
    assert abs(homogeneity(["a", "b"], {"a": 1, "b": 2}) - 1 / (1 + math.log(2))) <= 1e-9
    uniform = {str(i): i for i in range(24)}
    assert homogeneity(list(uniform), uniform) == pytest.approx(1 / (1 + math.log(24)), rel=1e-12)
    assert round(homogeneity(list(uniform), uniform), 4) == 0.2393


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 23), min_size=1, max_size=30))
def test_homogeneity_range(fields):
    majors = {str(i): f for i, f in enumerate(fields)}
    h = homogeneity(list(majors), majors)
    assert 0 < h <= 1


def test_field_label():
    assert field_label("abc", {"a": 3, "b": 3, "c": 7}) == 3
    assert field_label("ab", {"a": 7, "b": 3}) == 3
    assert field_label("a", {"a": 5}) == 5


@pytest.mark.parametrize("c, band", [(150, "highly-cited"), (101, "highly-cited"), (100, "medium-cited"),
                                     (30, "medium-cited"), (29, "low-cited"), (0, "low-cited")])
def test_citation_band(c, band):
    assert citation_band(c) == band


@pytest.mark.parametrize("c, rng", [(201, ">200"), (200, "101-200"), (101, "101-200"), (100, "31-100"),
                                    (31, "31-100"), (30, "<=30")])
def test_homogeneity_range_bins(c, rng):
    assert homogeneity_range(c) == rng


def test_field_circles():
    g = net(3, [])
    assert field_circles(g, {"0": 2, "1": 1, "2": 2}) == [["1"], ["0", "2"]]


def test_summarize_tables():
    a = EgoNetwork.from_edges("ego1", list("abcdefgh"), [("a", "b"), ("b", "c"), ("a", "c")])
    b = EgoNetwork.from_edges("ego2", ["ego1", "x", "y"], [("x", "y")])
    majors = {v: 0 for v in "abcdefgh"} | {"ego1": 1, "x": 1, "y": 2}
    tables = summarize([(a, [["a", "b", "c"], ["d", "e", "f", "g", "h"]]), (b, [])],
                       {"ego1": 150, "ego2": 10}, majors)
    fig3 = {r["ego"]: r for r in tables["fig3"]}
    assert fig3["ego1"]["mean_size"] == 4.0
    assert fig3["ego1"]["band"] == "highly-cited"
    assert fig3["ego1"]["memberships"] == 0
    assert fig3["ego2"]["n_circles"] == 0
    assert {r["size"]: r["count"] for r in tables["fig4a"]} == {3: 1, 5: 1}
    assert sum(r["count"] for r in tables["fig4b"]) == 2
    assert {r["n_circles"]: r["percent_egos"] for r in tables["fig4d"]} == {0: 50.0, 2: 50.0}
    row = tables["fig6"][0]
    assert row["field_0"] == 1.0
    assert len(tables["fig5a"]) == 1 and tables["fig5a"][0]["detected_cliquishness"] == 0.5


def test_summarize_needs_egos():
    with pytest.raises(ValueError):
        summarize([], {})

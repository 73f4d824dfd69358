import json

import pytest
from hypothesis import given, settings, strategies as st

from egocircles.corpus import (CorpusConfig, CorpusError, build_graph, edge_key, load_config,
                               load_corpus, snapshot, write_corpus)

from conftest import make_corpus

HEADER = "paper_id,year,field_id,citation_count,author_ids\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_file_gives_empty_corpus(tmp_path):
    corpus = load_corpus(write(tmp_path, "c.csv", HEADER))
    assert len(corpus) == 0
    assert corpus.authors() == []


def test_shared_author_counts(tmp_path):
    text = HEADER + "p1,1990,0,3,a1;a2\np2,1991,1,0,a1\np3,1992,2,5,a1;a3\n"
    corpus = load_corpus(write(tmp_path, "c.csv", text))
    assert len(corpus) == 3
    assert len(corpus.papers_by_author()["a1"]) == 3


def test_duplicate_author_names_paper(tmp_path):
    text = HEADER + "p1,1990,0,3,a1;a2\nbad7,1991,1,0,a1;a1\n"
    with pytest.raises(CorpusError, match="bad7"):
        load_corpus(write(tmp_path, "c.csv", text))


def test_parse_error_reports_line(tmp_path):
    text = HEADER + "p1,1990,0,3,a1\np2,nineteen,0,1,a2\n"
    with pytest.raises(CorpusError, match=r"c\.csv:3"):
        load_corpus(write(tmp_path, "c.csv", text))


def test_jsonl_parse_error_reports_line(tmp_path):
    rec = {"paper_id": "p1", "year": 1990, "field_id": 0, "citation_count": 1, "author_ids": ["a"]}
    text = json.dumps(rec) + "\n{not json\n"
    with pytest.raises(CorpusError, match=r"c\.jsonl:2"):
        load_corpus(write(tmp_path, "c.jsonl", text))


def test_unknown_field_label(tmp_path):
    text = HEADER + "p1,1990,Basket Weaving,3,a1\n"
    with pytest.raises(CorpusError, match="unknown field label"):
        load_corpus(write(tmp_path, "c.csv", text))


def test_field_label_resolves_to_index(tmp_path):
    text = HEADER + "p1,1990,Data Mining,3,a1\n"
    corpus = load_corpus(write(tmp_path, "c.csv", text))
    assert corpus.papers[0].field_id == corpus.field_names.index("Data Mining")


@pytest.mark.parametrize("row", ["p1,1950,0,3,a1", "p1,1990,24,3,a1", "p1,1990,0,-1,a1", "p1,1990,0,1,"])
def test_invariant_violations(tmp_path, row):
    with pytest.raises(CorpusError, match="p1"):
        load_corpus(write(tmp_path, "c.csv", HEADER + row + "\n"))


def test_roundtrip_csv_and_jsonl(tmp_path, small_corpus):
    for fmt in ("csv", "jsonl"):
        path = tmp_path / f"c.{fmt}"
        write_corpus(small_corpus, path, fmt)
        assert load_corpus(path).papers == small_corpus.papers


def test_config_file(tmp_path, monkeypatch):
    ini = write(tmp_path, "cfg.ini", "[fields]\nnames = alpha, beta\n[decades]\nbins = 1990-1999, 2000-2009\n"
                                     "[years]\nmin = 1990\nmax = 2009\n")
    cfg = load_config(ini)
    assert cfg.field_names == ("alpha", "beta")
    assert cfg.decade_of(2004) == 1
    assert cfg.decade_of(1985) is None
    monkeypatch.setenv("EGOCIRCLES_CONFIG", str(ini))
    assert load_config().n_fields == 2


def test_overlapping_decade_bins_rejected():
    with pytest.raises(CorpusError):
        CorpusConfig(decade_bins=((1990, 2000), (2000, 2009)))


def test_snapshot_filters():
    corpus = make_corpus([(1994, 0, 0, ("a",)), (1996, 0, 0, ("b",))])
    assert len(snapshot(corpus, 1995)) == 1
    assert snapshot(corpus, 2009).papers == corpus.papers
    assert len(snapshot(make_corpus([(1994, 0, 0, ("a",))]), 1993)) == 0


def test_snapshot_rejects_cutoff_outside_range():
    with pytest.raises(CorpusError):
        snapshot(make_corpus([]), 2050)


def test_graph_clique_per_paper():
    g = build_graph(make_corpus([(1990, 0, 0, ("a", "b", "c"))]))
    assert g.number_of_edges() == 3
    assert all(g.has_edge(x, y) for x, y in [("a", "b"), ("a", "c"), ("b", "c")])


def test_graph_dedups_repeated_pairs():
    g = build_graph(make_corpus([(1990, 0, 0, ("a", "b")), (1992, 0, 0, ("b", "a"))]))
    assert g.number_of_edges() == 1
    assert g.edge_info[("a", "b")] == (1990, 2)


def test_single_author_paper_is_isolated():
    g = build_graph(make_corpus([(1990, 0, 0, ("solo",))]))
    assert "solo" in g and g.degree("solo") == 0


papers_strategy = st.lists(
    st.tuples(st.integers(1960, 2009), st.integers(0, 23), st.integers(0, 50),
              st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=4, unique=True)),
    max_size=25)


@settings(max_examples=60, deadline=None)
@given(papers_strategy, st.integers(1960, 2009))
def test_snapshot_graph_is_subgraph(rows, cutoff):
    corpus = make_corpus(rows)
    full, part = build_graph(corpus), build_graph(snapshot(corpus, cutoff))
    assert set(part.nodes) <= set(full.nodes)
    assert set(part.edges()) <= set(full.edges())


@settings(max_examples=60, deadline=None)
@given(papers_strategy)
def test_edge_iff_shared_paper(rows):
    corpus = make_corpus(rows)
    g = build_graph(corpus)
    shared = {}
    for p in corpus.papers:
        for i, a in enumerate(p.author_ids):
            for b in p.author_ids[i + 1:]:
                k = edge_key(a, b)
                shared[k] = shared.get(k, 0) + 1
    assert {k: c for k, (_, c) in g.edge_info.items()} == shared
    for node in g.nodes:
        assert node not in g.neighbors(node)

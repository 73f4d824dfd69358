"""Bibliographic corpus loading, temporal snapshots and the co-authorship graph.

Corpus files are CSV with header ``paper_id,year,field_id,citation_count,author_ids``
(authors separated by ``;``) or JSON lines with the same keys (``author_ids`` a list).
``field_id`` may be an integer index or one of the configured field labels.
"""
from __future__ import annotations

import configparser
import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

DEFAULT_FIELDS = (
    "Algorithms and Theory",
    "Artificial Intelligence",
    "Bioinformatics",
    "Computer Education",
    "Computer Vision",
    "Data Mining",
    "Databases",
    "Distributed and Parallel Computing",
    "Graphics",
    "Human-Computer Interaction",
    "Hardware and Architecture",
    "Information Retrieval",
    "Machine Learning",
    "Multimedia",
    "Natural Language and Speech",
    "Networking",
    "Operating Systems",
    "Programming Languages",
    "Real-Time and Embedded Systems",
    "Scientific Computing",
    "Security and Privacy",
    "Simulation",
    "Software Engineering",
    "World Wide Web",
)
DEFAULT_DECADES = ((1960, 1970), (1971, 1980), (1981, 1990), (1991, 2000), (2001, 2009))
DEFAULT_YEAR_RANGE = (1960, 2009)

CONFIG_ENV = "EGOCIRCLES_CONFIG"
CSV_COLUMNS = ("paper_id", "year", "field_id", "citation_count", "author_ids")


class CorpusError(ValueError):
    """Raised for unparseable corpus files or records that break an invariant."""


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    year: int
    field_id: int
    citation_count: int
    author_ids: tuple[str, ...]


@dataclass(frozen=True)
class CorpusConfig:
    field_names: tuple[str, ...] = DEFAULT_FIELDS
    decade_bins: tuple[tuple[int, int], ...] = DEFAULT_DECADES
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE

    def __post_init__(self):
        bins = self.decade_bins
        for (lo, hi) in bins:
            if lo > hi:
                raise CorpusError(f"decade bin {lo}-{hi} is inverted")
        for (_, hi), (lo, _) in zip(bins, bins[1:]):
            if lo <= hi:
                raise CorpusError("decade bins must be disjoint and ordered")

    @property
    def n_fields(self) -> int:
        return len(self.field_names)

    def decade_of(self, year: int) -> int | None:
        for i, (lo, hi) in enumerate(self.decade_bins):
            if lo <= year <= hi:
                return i
        return None


def load_config(path: str | os.PathLike | None = None) -> CorpusConfig:
    """Read an INI config with ``[fields] names`` and ``[decades] bins`` entries.

    With no path, falls back to ``$EGOCIRCLES_CONFIG`` and then to the defaults.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV)
        if not path:
            return CorpusConfig()
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise CorpusError(f"cannot read config file {path}")
    kwargs = {}
    if parser.has_option("fields", "names"):
        names = [s.strip() for s in parser.get("fields", "names").replace("\n", ",").split(",")]
        kwargs["field_names"] = tuple(s for s in names if s)
    if parser.has_option("decades", "bins"):
        bins = []
        for chunk in parser.get("decades", "bins").replace("\n", ",").split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            lo, hi = chunk.split("-")
            bins.append((int(lo), int(hi)))
        kwargs["decade_bins"] = tuple(bins)
    if parser.has_section("years"):
        kwargs["year_range"] = (
            parser.getint("years", "min", fallback=DEFAULT_YEAR_RANGE[0]),
            parser.getint("years", "max", fallback=DEFAULT_YEAR_RANGE[1]),
        )
    return CorpusConfig(**kwargs)


@dataclass(frozen=True)
class PaperCorpus:
    papers: tuple[PaperRecord, ...]
    config: CorpusConfig = field(default_factory=CorpusConfig)

    @property
    def field_names(self) -> tuple[str, ...]:
        return self.config.field_names

    @property
    def decade_bins(self) -> tuple[tuple[int, int], ...]:
        return self.config.decade_bins

    def __len__(self) -> int:
        return len(self.papers)

    def papers_by_author(self) -> dict[str, list[PaperRecord]]:
        out: dict[str, list[PaperRecord]] = {}
        for p in self.papers:
            for a in p.author_ids:
                out.setdefault(a, []).append(p)
        return out

    def authors(self) -> list[str]:
        return sorted({a for p in self.papers for a in p.author_ids})


def _validate(rec: PaperRecord, config: CorpusConfig) -> None:
    if not rec.author_ids:
        raise CorpusError(f"paper {rec.paper_id}: no authors")
    if len(set(rec.author_ids)) != len(rec.author_ids):
        raise CorpusError(f"paper {rec.paper_id}: duplicate author in author_ids")
    lo, hi = config.year_range
    if not lo <= rec.year <= hi:
        raise CorpusError(f"paper {rec.paper_id}: year {rec.year} outside [{lo}, {hi}]")
    if not 0 <= rec.field_id < config.n_fields:
        raise CorpusError(f"paper {rec.paper_id}: field_id {rec.field_id} out of range")
    if rec.citation_count < 0:
        raise CorpusError(f"paper {rec.paper_id}: negative citation_count")


def _field_index(value, config: CorpusConfig, where: str) -> int:
    if isinstance(value, int):
        return value
    text = str(value).strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return config.field_names.index(text)
    except ValueError:
        raise CorpusError(f"{where}: unknown field label {text!r}") from None


def _make_record(raw: dict, config: CorpusConfig, where: str) -> PaperRecord:
    try:
        authors = raw["author_ids"]
        if isinstance(authors, str):
            authors = [a.strip() for a in authors.split(";") if a.strip()]
        rec = PaperRecord(
            paper_id=str(raw["paper_id"]),
            year=int(raw["year"]),
            field_id=_field_index(raw["field_id"], config, where),
            citation_count=int(raw["citation_count"]),
            author_ids=tuple(str(a) for a in authors),
        )
    except CorpusError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: cannot parse record ({exc})") from exc
    _validate(rec, config)
    return rec


def load_corpus(path: str | os.PathLike, format: str | None = None,
                config: CorpusConfig | None = None) -> PaperCorpus:
    """Load a corpus file; ``format`` is ``"csv"`` or ``"jsonl"`` (guessed from suffix if None)."""
    path = Path(path)
    config = config or load_config()
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".json") else "csv"
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        if format == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is not None and set(CSV_COLUMNS) - set(reader.fieldnames):
                raise CorpusError(f"{path}:1: header must contain {','.join(CSV_COLUMNS)}")
            for row in reader:
                records.append(_make_record(row, config, f"{path}:{reader.line_num}"))
        elif format == "jsonl":
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{lineno}: {exc.msg}") from exc
                records.append(_make_record(raw, config, f"{path}:{lineno}"))
        else:
            raise CorpusError(f"unknown corpus format {format!r}")
    return PaperCorpus(tuple(records), config)


def write_corpus(corpus: PaperCorpus, path: str | os.PathLike, format: str = "csv") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for p in corpus.papers:
                w.writerow([p.paper_id, p.year, p.field_id, p.citation_count, ";".join(p.author_ids)])
        else:
            for p in corpus.papers:
                fh.write(json.dumps({
                    "paper_id": p.paper_id, "year": p.year, "field_id": p.field_id,
                    "citation_count": p.citation_count, "author_ids": list(p.author_ids),
                }) + "\n")


def snapshot(corpus: PaperCorpus, cutoff_year: int) -> PaperCorpus:
    """Papers with ``year <= cutoff_year``; everything derived from it sees nothing later."""
    lo, hi = corpus.config.year_range
    if not lo <= cutoff_year <= hi:
        raise CorpusError(f"cutoff year {cutoff_year} outside [{lo}, {hi}]")
    return PaperCorpus(tuple(p for p in corpus.papers if p.year <= cutoff_year), corpus.config)


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass
class CoauthorGraph:
    """Undirected simple graph over author ids.

    ``edge_info`` maps each ``edge_key`` pair to ``(first_year, paper_count)``.
    """
    adj: dict[str, set[str]]
    edge_info: dict[tuple[str, str], tuple[int, int]]

    @property
    def nodes(self) -> list[str]:
        return sorted(self.adj)

    def neighbors(self, node: str) -> set[str]:
        return self.adj[node]

    def has_edge(self, a: str, b: str) -> bool:
        return b in self.adj.get(a, ())

    def degree(self, node: str) -> int:
        return len(self.adj[node])

    def edges(self) -> Iterable[tuple[str, str]]:
        return iter(sorted(self.edge_info))

    def number_of_edges(self) -> int:
        return len(self.edge_info)

    def __contains__(self, node) -> bool:
        return node in self.adj

    def __len__(self) -> int:
        return len(self.adj)


def build_graph(corpus: PaperCorpus) -> CoauthorGraph:
    adj: dict[str, set[str]] = {}
    info: dict[tuple[str, str], tuple[int, int]] = {}
    for p in corpus.papers:
        authors = p.author_ids
        for a in authors:
            adj.setdefault(a, set())
        for i, a in enumerate(authors):
            for b in authors[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
                key = edge_key(a, b)
                first, count = info.get(key, (p.year, 0))
                info[key] = (min(first, p.year), count + 1)
    return CoauthorGraph(adj, info)

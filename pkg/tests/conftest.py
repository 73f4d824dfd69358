import numpy as np
import pytest

from egocircles.corpus import CorpusConfig, PaperCorpus, PaperRecord


def make_corpus(rows, config=None):
    """rows: (year, field, citations, authors) tuples; ids are assigned in order."""
    papers = tuple(PaperRecord(f"p{i}", y, f, c, tuple(a)) for i, (y, f, c, a) in enumerate(rows))
    return PaperCorpus(papers, config or CorpusConfig())


@pytest.fixture
def small_corpus():
    return make_corpus([
        (1994, 3, 10, ("e", "a", "b")),
        (1996, 3, 4, ("e", "c")),
        (1996, 7, 0, ("a", "b")),
        (1999, 7, 25, ("c", "d")),
        (2003, 3, 2, ("e", "d")),
    ])


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


ACCEPTANCE_LINES: list[str] = []


def acceptance_report(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

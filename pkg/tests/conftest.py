from __future__ import annotations

import sys
from itertools import combinations, product

import pytest
from hypothesis import strategies as st

from pseudoramsey.graph_core import Graph


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 8) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep], "random")


# --- brute-force oracles, independent of the bitset kernels -----------------


def brute_has_clique(g: Graph, s: int) -> bool:
    edges = set(g.edges())
    return any(all((u, v) in edges for u, v in combinations(c, 2)) for c in combinations(range(g.n), s))


def brute_independent_counts(g: Graph) -> list[int]:
    edges = set(g.edges())
    counts = [0] * (g.n + 1)
    for r in range(g.n + 1):
        for c in combinations(range(g.n), r):
            if not any((u, v) in edges for u, v in combinations(c, 2)):
                counts[r] += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


def brute_tuple_count(g: Graph, t: int) -> int:
    edges = set(g.edges())
    total = 0
    for tup in product(range(g.n), repeat=t):
        if not any((min(a, b), max(a, b)) in edges for a, b in combinations(tup, 2)):
            total += 1
    return total


@pytest.fixture
def c5() -> Graph:
    return Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], "c5")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("tests.test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)

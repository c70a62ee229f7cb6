"""Bitset graphs and the exact combinatorial kernels built on them.

Adjacency rows are Python ints used as bitsets: bit ``v`` of ``rows[u]`` is set
iff ``uv`` is an edge. Everything here is pure and exact; counts are Python
ints, never floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ResourceLimitError

DEFAULT_NODE_BUDGET = 5_000_000


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    n: int
    rows: tuple[int, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for u, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {u} references a vertex outside [0, {self.n})")
            if (row >> u) & 1:
                raise ValueError(f"self-loop at vertex {u}")
            for v in iter_bits(row):
                if not (self.rows[v] >> u) & 1:
                    raise ValueError(f"adjacency is not symmetric at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], label: str = "") -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows), label)

    @classmethod
    def from_adjacency(cls, matrix: np.ndarray, label: str = "") -> "Graph":
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        rows = tuple(
            int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in a
        )
        return cls(a.shape[0], rows, label)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n, f"empty({n})")

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)), f"complete({n})")

    def relabel(self, label: str) -> "Graph":
        return Graph(self.n, self.rows, label)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in ascending lexicographic order."""
        return [(u, v) for u in range(self.n) for v in iter_bits(self.rows[u] >> (u + 1) << (u + 1))]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``[0, n)`` stored as a bitset with cached cardinality."""

    members: int
    size: int = field(init=False)

    def __post_init__(self) -> None:
        if self.members < 0:
            raise ValueError("bitset must be nonnegative")
        object.__setattr__(self, "size", self.members.bit_count())

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "VertexSet":
        return cls(mask_of(vertices))

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.members)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, v: int) -> bool:
        return bool((self.members >> v) & 1)

    def to_list(self) -> list[int]:
        return list(self)

    def within(self, n: int) -> bool:
        return self.members >> n == 0


def degree_profile(g: Graph) -> tuple[bool, int | None]:
    """Return ``(is_regular, d)``; ``d`` is None unless the graph is regular."""
    degs = set(g.degrees())
    if len(degs) <= 1:
        return True, degs.pop() if degs else 0
    return False, None


def complement(g: Graph) -> Graph:
    full = g.vertex_mask
    rows = tuple(full ^ r ^ (1 << v) for v, r in enumerate(g.rows))
    return Graph(g.n, rows, f"complement({g.label})")


def induced_subgraph(g: Graph, s: VertexSet) -> Graph:
    """Subgraph induced on ``s``, relabelled densely in ascending vertex order."""
    if not s.within(g.n):
        raise ValueError("vertex set is not contained in [0, n)")
    keep = s.to_list()
    index = {v: i for i, v in enumerate(keep)}
    rows = []
    for v in keep:
        rows.append(mask_of(index[w] for w in iter_bits(g.rows[v] & s.members)))
    return Graph(len(keep), tuple(rows), f"induced({g.label}, {keep})")


# ---------------------------------------------------------------------------
# Clique search


def _color_sort(rows: Sequence[int], cand: int) -> tuple[list[int], list[int]]:
    """Greedy sequential coloring of ``cand`` in ascending index order.

    Returns vertices grouped by color class and the (1-based) color of each.
    """
    order: list[int] = []
    colors: list[int] = []
    uncolored = cand
    color = 0
    while uncolored:
        color += 1
        q = uncolored
        while q:
            low = q & -q
            v = low.bit_length() - 1
            order.append(v)
            colors.append(color)
            uncolored ^= low
            q &= ~rows[v] & ~low
    return order, colors


def find_clique(g: Graph, s: int, node_budget: int | None = None) -> list[int] | None:
    """Return some clique of exactly ``s`` vertices, or None if none exists.

    Branch and bound with a greedy-coloring bound. Exact and deterministic.
    """
    if s <= 0:
        return []
    if s > g.n:
        return None
    rows = g.rows
    nodes = 0

    def expand(clique: list[int], cand: int) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise ResourceLimitError(f"clique search exceeded {node_budget} nodes")
        depth = len(clique)
        if depth + cand.bit_count() < s:
            return None
        order, colors = _color_sort(rows, cand)
        for i in range(len(order) - 1, -1, -1):
            if depth + colors[i] < s:
                return None
            v = order[i]
            clique.append(v)
            if depth + 1 == s:
                return sorted(clique)
            found = expand(clique, cand & rows[v])
            if found is not None:
                return found
            clique.pop()
            cand &= ~(1 << v)
        return None

    return expand([], g.vertex_mask)


def is_clique_free(g: Graph, s: int, node_budget: int | None = None) -> tuple[bool, VertexSet | None]:
    """``(True, None)`` if ``g`` has no ``K_s``, else ``(False, witness clique)``."""
    if s < 1:
        raise ValueError("clique size must be at least 1")
    found = find_clique(g, s, node_budget)
    if found is None:
        return True, None
    return False, VertexSet.of(found)


def max_clique(g: Graph, node_budget: int | None = None) -> list[int]:
    """A maximum clique (MCQ-style branch and bound)."""
    rows = g.rows
    best: list[int] = []
    nodes = 0

    def expand(clique: list[int], cand: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise ResourceLimitError(f"clique search exceeded {node_budget} nodes")
        order, colors = _color_sort(rows, cand)
        for i in range(len(order) - 1, -1, -1):
            if len(clique) + colors[i] <= len(best):
                return
            v = order[i]
            clique.append(v)
            nxt = cand & rows[v]
            if nxt:
                expand(clique, nxt)
            elif len(clique) > len(best):
                best = sorted(clique)
            clique.pop()
            cand &= ~(1 << v)

    expand([], g.vertex_mask)
    return best


def clique_number(g: Graph, node_budget: int | None = None) -> int:
    return len(max_clique(g, node_budget))


# ---------------------------------------------------------------------------
# Independent-set counting


def _components(rows: Sequence[int], mask: int) -> list[int]:
    comps = []
    while mask:
        seed = mask & -mask
        comp = frontier = seed
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= rows[v]
            frontier = reach & mask & ~comp
            comp |= frontier
        comps.append(comp)
        mask &= ~comp
    return comps


def _poly_mul(a: list[int], b: list[int], cap: int) -> list[int]:
    out = [0] * min(len(a) + len(b) - 1, cap + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if i + j > cap:
                break
            out[i + j] += x * y
    return out


def _poly_add_shift(a: list[int], b: list[int], cap: int) -> list[int]:
    """``a + x*b`` truncated at degree ``cap``."""
    out = list(a) + [0] * max(0, min(len(b) + 1, cap + 1) - len(a))
    for j, y in enumerate(b):
        if j + 1 > cap:
            break
        out[j + 1] += y
    return out


def independence_polynomial(
    g: Graph, j_max: int | None = None, node_budget: int = DEFAULT_NODE_BUDGET
) -> list[int]:
    """Coefficients ``[i_0, i_1, ...]`` of the independence polynomial.

    Exact, via the vertex recurrence ``I(G) = I(G - v) + x I(G - N[v])`` with
    component splitting, memoisation on vertex bitsets, and closed forms for
    edgeless and complete components. Truncated at degree ``j_max`` if given.
    Trailing zero coefficients are stripped.
    """
    cap = g.n if j_max is None else min(j_max, g.n)
    rows = g.rows
    memo: dict[int, list[int]] = {0: [1]}
    nodes = 0

    def solve_connected(mask: int) -> list[int]:
        nonlocal nodes
        if mask in memo:
            return memo[mask]
        size = mask.bit_count()
        degs = [(rows[v] & mask).bit_count() for v in iter_bits(mask)]
        if min(degs) == size - 1:
            res = [1, size][: cap + 1]
            memo[mask] = res
            return res
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(
                f"independent-set count exceeded node budget {node_budget}; reduce the instance"
            )
        verts = list(iter_bits(mask))
        best = max(range(len(verts)), key=lambda i: (degs[i], -verts[i]))
        v = verts[best]
        without = solve(mask & ~(1 << v))
        closed = solve(mask & ~rows[v] & ~(1 << v))
        res = _poly_add_shift(without, closed, cap)
        memo[mask] = res
        return res

    def solve(mask: int) -> list[int]:
        if mask in memo:
            return memo[mask]
        isolated = 0
        res = [1]
        for comp in _components(rows, mask):
            if comp & (comp - 1) == 0:
                isolated += 1
            else:
                res = _poly_mul(res, solve_connected(comp), cap)
        if isolated:
            res = _poly_mul(res, [comb(isolated, j) for j in range(min(isolated, cap) + 1)], cap)
        memo[mask] = res
        return res

    coeffs = solve(g.vertex_mask)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def enumerate_independent_sets(
    g: Graph, j_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> list[int]:
    """Exact ``i_j(g)`` for ``0 <= j <= j_max`` (zero-padded past the independence number)."""
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    coeffs = independence_polynomial(g, j_max, node_budget)
    return coeffs + [0] * (j_max + 1 - len(coeffs))


@lru_cache(maxsize=None)
def _stirling2_row(t: int) -> tuple[int, ...]:
    if t == 0:
        return (1,)
    prev = _stirling2_row(t - 1)
    row = [0] * (t + 1)
    for j in range(1, t + 1):
        row[j] = j * (prev[j] if j < len(prev) else 0) + prev[j - 1]
    return tuple(row)


def stirling2(t: int, j: int) -> int:
    """Stirling number of the second kind S(t, j)."""
    if t < 0 or j < 0 or j > t:
        return 0
    # build rows bottom-up so the cache never recurses deeply
    for r in range(0, t + 1, 256):
        _stirling2_row(r)
    return _stirling2_row(t)[j]


@dataclass(frozen=True)
class TupleCountReport:
    t: int
    exact_count: int
    independence_profile: tuple[int, ...]
    alpha: int


def count_independent_tuples(
    g: Graph, t: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> TupleCountReport:
    """Count tuples in ``V(g)^t`` with no adjacent pair of coordinates.

    Repeated coordinates are allowed. A tuple with image of size ``j`` is a
    surjection onto an independent ``j``-set, so the count is
    ``sum_j i_j * j! * S(t, j)``.
    """
    if t < 1:
        raise ValueError("tuple length must be at least 1")
    profile = independence_polynomial(g, None, node_budget)
    alpha = len(profile) - 1
    total = sum(profile[j] * factorial(j) * stirling2(t, j) for j in range(1, min(t, alpha) + 1))
    return TupleCountReport(t=t, exact_count=total, independence_profile=tuple(profile), alpha=alpha)

"""K_s-free graph families with known spectra, and blowup rescaling maps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivisibilityError, ExhaustedAttemptsError, InvalidModulusError
from .graph_core import Graph, clique_number, find_clique, iter_bits
from .seeding import check_seed, rng_from_seed
from .spectral import FamilySpec, effective_alpha

MAX_PALEY_Q = 2000


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def paley(q: int, max_q: int = MAX_PALEY_Q) -> Graph:
    """Paley graph on Z_q: ``uv`` is an edge iff ``u - v`` is a nonzero square."""
    if not _is_prime(q) or q % 4 != 1:
        raise InvalidModulusError(f"Paley graph needs a prime q = 1 (mod 4), got {q}")
    if q > max_q:
        raise InvalidModulusError(f"q={q} exceeds cap {max_q}")
    residues = {(x * x) % q for x in range(1, q)}
    shift = 0
    for r in residues:
        shift |= 1 << r
    full = (1 << q) - 1
    rows = []
    for u in range(q):
        # rotate the residue mask by u: neighbours are u + r (mod q)
        rows.append(((shift << u) | (shift >> (q - u))) & full)
    return Graph(q, tuple(rows), f"paley({q})")


def turan(n: int, r: int) -> Graph:
    """Complete balanced r-partite graph; part of vertex v is ``v // (n // r)``."""
    if r < 2:
        raise ValueError("need at least two parts")
    if n % r:
        raise DivisibilityError(f"{r} does not divide {n}")
    size = n // r
    full = (1 << n) - 1
    rows = []
    for v in range(n):
        part = v // size
        own = ((1 << size) - 1) << (part * size)
        rows.append(full & ~own)
    return Graph(n, tuple(rows), f"turan({n},{r})")


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"cycle({n})")


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(u, a + v) for u in range(a) for v in range(b)], f"K({a},{b})")


@dataclass(frozen=True)
class BlowupMap:
    source_n: int
    target_n: int
    assignment: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        if len(self.assignment) != self.target_n:
            raise ValueError("assignment length must equal target_n")
        if any(not 0 <= a < self.source_n for a in self.assignment):
            raise ValueError("assignment values must lie in [0, source_n)")

    def fiber_sizes(self) -> list[int]:
        sizes = [0] * self.source_n
        for a in self.assignment:
            sizes[a] += 1
        return sizes


def blowup_from_map(g: Graph, fmap: BlowupMap, label: str = "") -> Graph:
    """Graph on ``[N]`` with ``ij`` an edge iff ``f(i) f(j)`` is an edge of ``g``."""
    if fmap.source_n != g.n:
        raise ValueError("blowup map does not match the source graph")
    fibers = [0] * g.n
    for i, a in enumerate(fmap.assignment):
        fibers[a] |= 1 << i
    reach = []
    for v in range(g.n):
        m = 0
        for w in iter_bits(g.rows[v]):
            m |= fibers[w]
        reach.append(m)
    rows = tuple(reach[a] for a in fmap.assignment)
    return Graph(fmap.target_n, rows, label)


def balanced_blowup(g: Graph, t: int) -> tuple[Graph, BlowupMap]:
    """Replace each vertex by an independent block of ``t`` vertices."""
    if t < 1:
        raise ValueError("blowup factor must be at least 1")
    fmap = BlowupMap(g.n, g.n * t, tuple(i // t for i in range(g.n * t)))
    return blowup_from_map(g, fmap, f"blowup({g.label},{t})"), fmap


def even_blowup(g: Graph, N: int) -> tuple[Graph, BlowupMap]:
    """Deterministic blowup to any N with contiguous fibers ``i -> floor(i n / N)``.

    Fiber sizes differ by at most one; ``N == n`` gives the identity.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    fmap = BlowupMap(g.n, N, tuple(i * g.n // N for i in range(N)))
    return blowup_from_map(g, fmap, f"even_blowup({g.label},{N})"), fmap


def random_blowup(g: Graph, N: int, seed: int) -> tuple[Graph, BlowupMap]:
    """Blowup along a uniform random map ``[N] -> V(g)``; collisions are non-edges."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if g.n < 1:
        raise ValueError("source graph has no vertices")
    seed = check_seed(seed)
    f = rng_from_seed(seed).integers(0, g.n, size=N)
    fmap = BlowupMap(g.n, N, tuple(int(a) for a in f), seed)
    return blowup_from_map(g, fmap, f"random_blowup({g.label},{N},seed={seed})"), fmap


def random_regular_ks_free(
    n: int, d: int, s: int, seed: int, max_attempts: int = 1000
) -> Graph:
    """Rejection-sample a simple d-regular K_s-free graph from the pairing model."""
    if (n * d) % 2 or d >= n or d < 0:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices (need nd even, d < n)")
    if s < 3:
        raise ValueError("s must be at least 3")
    rng = rng_from_seed(seed)
    points = np.repeat(np.arange(n), d)
    for _ in range(max_attempts):
        pairs = rng.permutation(points).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keyed = {(int(min(a, b)), int(max(a, b))) for a, b in pairs}
        if len(keyed) != len(pairs):
            continue
        g = Graph.from_edges(n, sorted(keyed), f"random_regular({n},{d},K{s}-free,seed={seed})")
        if find_clique(g, s) is None:
            return g
    raise ExhaustedAttemptsError(
        f"no K_{s}-free {d}-regular graph on {n} vertices in {max_attempts} attempts"
    )


# ---------------------------------------------------------------------------
# Family registry used by the CLI and by certificate recipes.


@lru_cache(maxsize=64)
def _clique_number_cached(g: Graph) -> int:
    return clique_number(g)


def build_family(spec: str, seed: int | None = None) -> Graph:
    """Build a graph from ``name:arg:arg``.

    Names: ``cycle:n``, ``paley:q``, ``turan:n:r``, ``bipartite:a:b``,
    ``complete:n``, ``empty:n``, ``regular:n:d:s`` (requires ``seed``).
    """
    name, *raw = spec.split(":")
    try:
        args = [int(a) for a in raw]
    except ValueError:
        raise ValueError(f"family arguments must be integers: {spec!r}") from None
    builders = {
        "cycle": (1, lambda a: cycle(*a)),
        "paley": (1, lambda a: paley(*a)),
        "turan": (2, lambda a: turan(*a)),
        "bipartite": (2, lambda a: complete_bipartite(*a)),
        "complete": (1, lambda a: Graph.complete(*a)),
        "empty": (1, lambda a: Graph.empty(*a)),
    }
    if name == "regular":
        if len(args) != 3:
            raise ValueError("regular family takes n:d:s")
        if seed is None:
            raise ValueError("regular family requires a seed")
        return random_regular_ks_free(*args, seed=seed)
    if name not in builders:
        raise ValueError(f"unknown family {name!r}")
    arity, build = builders[name]
    if len(args) != arity:
        raise ValueError(f"family {name!r} takes {arity} integer argument(s)")
    return build(args)


def forbidden_clique_size(g: Graph) -> int:
    """Smallest s with g K_s-free, by exact search."""
    return _clique_number_cached(g) + 1


def family_spec(g: Graph, name: str | None = None) -> FamilySpec | None:
    """Metadata for the family ``g`` is drawn from, or None if it forbids no K_s with s >= 3."""
    s = forbidden_clique_size(g)
    if s < 3 or g.n < 2:
        return None
    d = max(g.degrees(), default=0)
    return FamilySpec(s=s, alpha=effective_alpha(g.n, d), family_name=name or g.label)
